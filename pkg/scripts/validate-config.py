#!/usr/bin/env python3
"""Configuration validation script for noonforge."""

import os
import sys
from pathlib import Path

# Add project root to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

try:
    from pydantic import ValidationError

    from src.utils.config import Settings, get_settings
except ImportError as e:
    print(f"❌ Failed to import project modules: {e}")
    print("   Make sure you're running this from the project root.")
    sys.exit(1)

ENV_PREFIX = "NOONFORGE_"


def read_environment_file(env_path: Path) -> dict[str, str]:
    """Load NOONFORGE_ entries from an environment file."""
    if not env_path.exists():
        print(f"  ⚪ {env_path} not found")
        return {}

    env_vars = {}
    for line in env_path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#") and "=" in line:
            key, value = line.split("=", 1)
            env_vars[key.strip()] = value.strip().strip("\"'")

    print(f"  ✅ {env_path}: {len(env_vars)} variables")
    return env_vars


def check_unknown_variables(env_vars: dict[str, str]) -> list[str]:
    """Prefixed variables that no setting reads (typos are silently ignored)."""
    known = {f"{ENV_PREFIX}{name.upper()}" for name in Settings.model_fields}
    return sorted(key for key in env_vars if key.startswith(ENV_PREFIX) and key not in known)


def validate_settings() -> Settings | None:
    """Validate settings loading."""
    try:
        settings = get_settings()
    except ValidationError as e:
        print(f"❌ Failed to load settings: {e}")
        return None

    print("\n✅ Settings loaded successfully!")
    print(f"  🔢 Photon cap: {settings.max_photons}")
    print(f"  🧵 Workers: {settings.workers}")
    print(f"  🗺️  Seeding grid: {settings.grid_shape}, restarts: {settings.restarts}")
    print(f"  🎯 Fidelity tolerance: {settings.fidelity_tolerance}")
    print(f"  🛡️  Log level: {settings.log_level} (json={settings.log_json})")
    return settings


def check_dependencies() -> bool:
    """Check if all required dependencies are installed."""
    print("\n🔍 Checking dependencies...")

    missing_packages = []
    for package in ["pydantic", "pydantic_settings", "dotenv", "structlog", "numpy", "scipy"]:
        try:
            __import__(package)
            print(f"  ✅ {package}")
        except ImportError:
            missing_packages.append(package)
            print(f"  ❌ {package}")

    if missing_packages:
        print(f"\n❌ Missing packages: {', '.join(missing_packages)}")
        print("   Run 'uv sync --all-extras' to install dependencies")
        return False
    return True


def main():
    """Main validation function."""
    print("🔧 noonforge Configuration Validator")
    print("=" * 50)

    print("\n📄 Environment:")
    env_vars = read_environment_file(Path(".env"))
    env_vars.update({k: v for k, v in os.environ.items() if k.startswith(ENV_PREFIX)})
    unknown = check_unknown_variables(env_vars)
    for key in unknown:
        print(f"  ⚠️  {key} is not a known setting")

    dependencies_ok = check_dependencies()
    settings = validate_settings()

    print("\n" + "=" * 50)
    if settings and dependencies_ok and not unknown:
        print("✅ Configuration validation passed!")
    else:
        print("❌ Configuration validation failed!")
        sys.exit(1)


if __name__ == "__main__":
    main()
