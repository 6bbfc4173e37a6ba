"""Configuration management for Bol-Moufang Lab."""

from pathlib import Path
import json
import os
from typing import Dict, List, Optional, Any
import logging

from dotenv import load_dotenv
from pydantic import BaseModel, Field
from rich.console import Console
from rich.logging import RichHandler

THREADS_ENV = "BM_LAB_THREADS"


class SearchConfig(BaseModel):
    budget: int = Field(default=10 ** 8, gt=0)
    max_order: int = Field(default=7, ge=6, le=8)
    threads: int = Field(default=1, ge=1)
    incremental: bool = True
    canonical_filter: bool = False


class ReportConfig(BaseModel):
    max_exhaustive_order: int = Field(default=4, ge=1, le=5)
    witness_order_cap: int = Field(default=6, ge=1, le=8)
    spot_rows: List[str] = Field(default_factory=lambda: ["F1", "F19", "F26", "F38", "F41", "F42"])
    spot_order: int = Field(default=5, ge=1, le=6)


class PathConfig(BaseModel):
    fixtures: Optional[str] = None
    reports: str = Field(default="reports")
    logs: str = Field(default="logs")


class LoggingConfig(BaseModel):
    level: str = Field(default="INFO")
    format: str = Field(default="%(message)s")
    file: str = Field(default="bm_lab.log")


class ServerConfig(BaseModel):
    host: str = Field(default="localhost")
    port: int = Field(default=8000, gt=0, lt=65536)
    max_search_order: int = Field(default=5, ge=1, le=8, description="Largest order a single /search request may reach")


class AppConfig(BaseModel):
    search: SearchConfig = Field(default_factory=SearchConfig)
    report: ReportConfig = Field(default_factory=ReportConfig)
    paths: PathConfig = Field(default_factory=PathConfig)
    server: ServerConfig = Field(default_factory=ServerConfig)
    log_level: str = Field(default="info", pattern="^(debug|info|warning|error|critical)$")
    logging: LoggingConfig = Field(default_factory=LoggingConfig)


class ConfigManager:
    def __init__(self, config_path: str = "config.json", user_config_dir: Optional[Path] = None, setup_logging: bool = True):
        self.config_path = config_path
        self.user_config_dir = user_config_dir or Path.home() / ".bm-lab"
        self.user_config_path = self.user_config_dir / "config.json"
        load_dotenv()
        self.config = self.load_config()
        if setup_logging:
            self.setup_logging()

    def load_config(self) -> AppConfig:
        """Load and merge configuration from default and user config files"""
        default_config = self._load_json(self.config_path, {})
        user_config = self._load_json(self.user_config_path, {})

        if not default_config:
            default_config = AppConfig().model_dump()

        merged_config = self._deep_merge(default_config, user_config)
        threads = os.environ.get(THREADS_ENV)
        if threads:
            merged_config = self._deep_merge(merged_config, {"search": {"threads": threads}})

        try:
            return AppConfig(**merged_config)
        except Exception as e:
            logging.error(f"Invalid configuration: {str(e)}")
            raise

    def _load_json(self, path: Path, default: Dict) -> Dict:
        """Load JSON file with fallback to default"""
        try:
            with open(path) as f:
                return json.load(f)
        except (FileNotFoundError, json.JSONDecodeError) as e:
            logging.debug(f"No config loaded from {path}: {str(e)}")
            return default

    def _deep_merge(self, dict1: Dict, dict2: Dict) -> Dict:
        """Deep merge two dictionaries"""
        result = dict1.copy()
        for key, value in dict2.items():
            if key in result and isinstance(result[key], dict) and isinstance(value, dict):
                result[key] = self._deep_merge(result[key], value)
            else:
                result[key] = value
        return result

    def save_user_config(self, updates: Dict[str, Any]) -> None:
        """Save user-specific configuration"""
        try:
            self.user_config_dir.mkdir(parents=True, exist_ok=True)

            current_config = self._load_json(self.user_config_path, {})
            new_config = self._deep_merge(current_config, updates)

            # Validate against the defaults before writing
            default_config = AppConfig().model_dump()
            full_config = self._deep_merge(default_config, new_config)
            AppConfig(**full_config)

            with open(self.user_config_path, 'w') as f:
                json.dump(new_config, f, indent=4)

            self.config = self.load_config()

        except Exception as e:
            logging.error(f"Failed to save user configuration: {str(e)}")
            raise

    def setup_logging(self, verbose: bool = False) -> None:
        """Configure logging based on settings"""
        log_levels = {
            "debug": logging.DEBUG,
            "info": logging.INFO,
            "warning": logging.WARNING,
            "error": logging.ERROR,
            "critical": logging.CRITICAL
        }
        level = logging.DEBUG if verbose else log_levels[self.config.log_level]

        log_dir = Path(self.config.paths.logs)
        log_dir.mkdir(parents=True, exist_ok=True)

        file_handler = logging.FileHandler(log_dir / self.config.logging.file)
        file_handler.setFormatter(logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s'))

        logging.basicConfig(
            level=level,
            format=self.config.logging.format,
            handlers=[
                file_handler,
                RichHandler(console=Console(stderr=True), rich_tracebacks=True, show_path=False),
            ],
            force=True,
        )

    def resolve_threads(self, override: Optional[int] = None) -> int:
        """--threads beats BM_LAB_THREADS beats the config file."""
        if override is not None:
            return max(1, override)
        return self.config.search.threads
