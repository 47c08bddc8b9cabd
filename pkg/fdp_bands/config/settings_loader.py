import copy
import os
from typing import Dict, Any, List, Optional

import yaml
from dotenv import load_dotenv

from ..core.errors import ParameterError

TABLE_ENV = "FDP_BANDS_TABLE"
PROFILE_ENV = "FDP_BANDS_PROFILE"


class SettingsLoader:
    """Settings loader class for the YAML defaults, a user override file and a named profile"""

    def __init__(self, config_path: Optional[str] = None, profile: Optional[str] = None, use_dotenv: bool = True):
        """
        Initialize settings loader
        :param config_path: Path to a user YAML file merged over the defaults
        :param profile: Profile name ("desk" or "full"); FDP_BANDS_PROFILE or the file's default otherwise
        :param use_dotenv: Read a .env file into the environment first
        """
        if use_dotenv:
            load_dotenv()
        self.defaults_path = os.path.join(os.path.dirname(__file__), 'defaults.yaml')
        self.custom_config_path = config_path
        self.requested_profile = profile
        self.raw: Dict[str, Any] = {}  # Will be loaded on demand

    def _load_yaml(self, file_path: str) -> Dict[str, Any]:
        """Load YAML file"""
        if not os.path.exists(file_path):
            return {}
        with open(file_path, 'r', encoding='utf-8') as f:
            return yaml.safe_load(f) or {}

    def _deep_update(self, base: Dict[str, Any], update: Dict[str, Any]) -> Dict[str, Any]:
        """Deep update dictionary"""
        for key, value in update.items():
            if isinstance(value, dict) and key in base and isinstance(base[key], dict):
                base[key] = self._deep_update(base[key], value)
            else:
                base[key] = value
        return base

    def _load_raw(self) -> Dict[str, Any]:
        if not self.raw:
            raw = self._load_yaml(self.defaults_path)
            if self.custom_config_path:
                if not os.path.exists(self.custom_config_path):
                    raise ParameterError(f"Config file not found: {self.custom_config_path}")
                raw = self._deep_update(raw, self._load_yaml(self.custom_config_path))
            self.raw = raw
        return self.raw

    @property
    def profile(self) -> str:
        return self.requested_profile or os.environ.get(PROFILE_ENV) or self._load_raw().get("profile", "desk")

    def list_profiles(self) -> List[str]:
        return list(self._load_raw().get("profiles", {}))

    def get_settings(self) -> Dict[str, Any]:
        """Shared keys with the active profile merged in"""
        raw = copy.deepcopy(self._load_raw())
        profiles = raw.pop("profiles", {})
        name = self.profile
        if name not in profiles:
            raise ParameterError(f"Unknown profile '{name}'. Available: {sorted(profiles)}")
        settings = self._deep_update(raw, profiles[name])
        settings["profile"] = name
        return settings

    def get_section(self, section: str) -> Dict[str, Any]:
        return dict(self.get_settings().get(section, {}))

    @staticmethod
    def table_path(explicit: Optional[str] = None) -> Optional[str]:
        """--table flag first, then FDP_BANDS_TABLE"""
        return explicit or os.environ.get(TABLE_ENV) or None
