"""Environment and scenario presets shipped with the package."""

from __future__ import annotations

import configparser
from importlib import resources

from .channel import EnvironmentParams
from .errors import ConfigurationError

_ENV_FIELDS = ("phi", "psi", "alpha_los", "alpha_nlos", "k_los", "k_nlos",
               "mu_los_db", "mu_nlos_db", "a_los", "c_los", "a_nlos",
               "c_nlos", "w_los", "w_nlos")


def _read_data_file(name: str) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None)
    text = resources.files("uavcache.data").joinpath(name).read_text()
    parser.read_string(text)
    return parser


def environment_names() -> tuple[str, ...]:
    return tuple(_read_data_file("environments.cfg").sections())


def load_environment(name: str) -> EnvironmentParams:
    parser = _read_data_file("environments.cfg")
    if name not in parser:
        raise ConfigurationError(
            f"unknown environment {name!r}; known: {parser.sections()}")
    section = parser[name]
    values = {field: section.getfloat(field) for field in _ENV_FIELDS}
    return EnvironmentParams(name=name, **values)


def scenario_names() -> tuple[str, ...]:
    return tuple(_read_data_file("scenarios.cfg").sections())


def load_scenario(name: str) -> dict:
    parser = _read_data_file("scenarios.cfg")
    if name not in parser:
        raise ConfigurationError(
            f"unknown scenario {name!r}; known: {parser.sections()}")
    return dict(parser[name])
