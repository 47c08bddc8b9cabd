from .settings_loader import SettingsLoader, TABLE_ENV, PROFILE_ENV
