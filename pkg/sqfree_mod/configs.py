"""Shared configs"""
import logging
import os
from configparser import ConfigParser
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from ruamel.yaml import YAML

logger = logging.getLogger(__name__)  # pylint: disable=invalid-name

SETTINGS_PATH = 'configs/sqfree_mod.ini'
CHECKPOINT_PATH = 'configs/search_checkpoint.ini'

DATA_DIR_ENV = 'SQFREE_DATA_DIR'
BUNDLED_DATA_DIR = Path(__file__).resolve().parent / 'data'

CIRCULAR_MORPHISMS_FILE = 'circular_morphisms.yml'
BAD_PATTERNS_FILE = 'bad_patterns.yml'
COMPLETION_CHECKS_FILE = 'completion_checks.yml'
PAIRS_FILE = 'pairs.yml'


@dataclass(frozen=True)
class Settings:
    """Tunable limits, read from the settings file"""
    node_cap: int = 10**9
    checkpoint_every: int = 10**7
    max_length: int = 10**4
    scan_cap: int = 10**4
    threads: int = 1


def data_path(filename: str) -> Path:
    """Path of a bundled data file, honouring SQFREE_DATA_DIR"""
    data_dir = os.environ.get(DATA_DIR_ENV)
    return (Path(data_dir) if data_dir else BUNDLED_DATA_DIR) / filename


def load_data(filename: str) -> Any:
    """Load a bundled YAML table"""
    yaml = YAML()
    path = data_path(filename)
    with open(path, encoding='utf-8') as data_file:
        data = yaml.load(data_file)
    logger.debug('Loaded %s (version %s).', path, data.get('version'))
    return data


def load_settings(path: str = SETTINGS_PATH) -> Settings:
    """Read the settings file; missing files and keys keep their defaults"""
    config_parser = ConfigParser(interpolation=None)

    try:
        with open(path, encoding='utf-8') as settings_file:
            config_parser.read_file(settings_file)
    except OSError:
        logger.debug('No settings file at %s, using defaults.', path)
        return Settings()

    defaults = Settings()
    return Settings(
        node_cap=config_parser.getint('Search', 'node_cap', fallback=defaults.node_cap),
        checkpoint_every=config_parser.getint(
            'Search', 'checkpoint_every', fallback=defaults.checkpoint_every
        ),
        max_length=config_parser.getint('Search', 'max_length', fallback=defaults.max_length),
        scan_cap=config_parser.getint('Construction', 'scan_cap', fallback=defaults.scan_cap),
        threads=config_parser.getint('Runtime', 'threads', fallback=defaults.threads),
    )
