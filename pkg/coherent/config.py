'''
Logic for the `coherent config` command: persistent run defaults, stored as YAML under
the coherent home directory (~/.coherent, or $COHERENT_HOME).

Author: The Coherent Pairs Team
'''

import os
from dataclasses import dataclass, asdict
from datetime import datetime, timezone
from typing import Dict, Optional, Tuple

import yaml

from . import audit
from .errors import ConfigError
from .scalars import make_field

BACKENDS = ("exact", "float")

DEFAULTS = {
    "backend": "exact",
    "precision_bits": 128,
    "tolerance": "1e-15",
    "nmax": 10,
}


def coherent_home() -> str:
    return os.environ.get("COHERENT_HOME") or os.path.expanduser("~/.coherent")


def config_file() -> str:
    return os.path.join(coherent_home(), "config.yaml")


@dataclass
class RunConfig:
    """Settings shared by every command, after flags, stored defaults and built-ins are merged."""

    command: str
    backend: str = DEFAULTS["backend"]
    precision_bits: int = DEFAULTS["precision_bits"]
    tolerance: str = DEFAULTS["tolerance"]
    nmax: int = DEFAULTS["nmax"]
    out: Optional[str] = None

    def validate(self):
        if self.backend not in BACKENDS:
            raise ConfigError(f"unknown backend {self.backend!r}; choose exact or float")
        if self.command == "griffin" and self.backend == "exact":
            raise ConfigError("the griffin pipeline integrates numerically; use --backend float")
        if self.nmax < 0:
            raise ConfigError(f"--nmax must be non-negative, got {self.nmax}")
        if self.precision_bits < 16:
            raise ConfigError(f"--precision-bits must be at least 16, got {self.precision_bits}")

    def field(self):
        return make_field(self.backend, self.precision_bits, self.tolerance)

    def describe(self) -> Dict:
        return asdict(self)


def load_config() -> Optional[Dict]:
    """Load stored defaults, or None when nothing is configured."""
    path = config_file()
    if not os.path.exists(path):
        return None
    try:
        with open(path, "r") as f:
            return yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as e:
        audit.log_warning(f"Failed to load config: {e}")
        return None


def save_config(backend: Optional[str] = None, precision_bits: Optional[int] = None,
                tolerance: Optional[str] = None, nmax: Optional[int] = None) -> Tuple[bool, str]:
    """
    Merge the given values into the stored defaults.

    Returns:
        Tuple of (success, message)
    """
    config = dict(DEFAULTS)
    config.update(load_config() or {})
    updates = {"backend": backend, "precision_bits": precision_bits, "tolerance": tolerance, "nmax": nmax}
    for key, value in updates.items():
        if value is not None:
            config[key] = value

    if config["backend"] not in BACKENDS:
        return False, f"Unknown backend: {config['backend']}. Use exact or float."
    try:
        make_field("float", config["precision_bits"], config["tolerance"])
    except Exception as e:
        return False, f"Invalid float settings: {e}"
    if int(config["nmax"]) < 0:
        return False, "nmax must be non-negative."

    config["tolerance"] = str(config["tolerance"])
    config["configured_at"] = datetime.now(timezone.utc).isoformat()
    os.makedirs(coherent_home(), exist_ok=True)
    with open(config_file(), "w") as f:
        yaml.dump(config, f, default_flow_style=False)

    audit.log_info(f"Configuration saved: backend={config['backend']}, nmax={config['nmax']}")
    return True, f"Defaults saved to {config_file()}"


def delete_config() -> Tuple[bool, str]:
    path = config_file()
    if not os.path.exists(path):
        return False, "No configuration found."
    os.remove(path)
    audit.log_info("Configuration deleted")
    return True, "Configuration deleted."


def get_config_status() -> Dict:
    config = load_config()
    if config is None:
        return {
            "configured": False,
            "message": "No defaults stored. Run: coherent config setup --backend <exact|float>",
            **DEFAULTS,
        }
    merged = dict(DEFAULTS)
    merged.update(config)
    merged["configured"] = True
    merged.setdefault("configured_at", "Unknown")
    return merged


def resolve_run_config(command: str, backend=None, precision_bits=None, tolerance=None,
                       nmax=None, out=None) -> RunConfig:
    """Flags override stored defaults, stored defaults override built-ins."""
    stored = load_config() or {}
    default_backend = "float" if command == "griffin" else stored.get("backend", DEFAULTS["backend"])

    def pick(flag, key):
        if flag is not None:
            return flag
        return stored.get(key, DEFAULTS[key])

    config = RunConfig(
        command=command,
        backend=backend if backend is not None else default_backend,
        precision_bits=int(pick(precision_bits, "precision_bits")),
        tolerance=str(pick(tolerance, "tolerance")),
        nmax=int(pick(nmax, "nmax")),
        out=out,
    )
    config.validate()
    return config
