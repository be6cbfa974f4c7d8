"""TOML configuration: the single source of truth for the CLI.

Schema (all keys optional unless a subcommand needs them):

    [lattice]      dims = [10]            per-axis lengths
                   bc = ["open"]          "open" | "periodic" per axis
                   local_dim = 2
    [model]        name = "tfim"          tfim | xxz | dimer_hopping | two_qubit |
                                          fermion_dimer | boson_chain | tight_binding
    [model.params] h = 2.0                family-specific couplings
    [bipartition]  cut = 5                axis-0 cut index, or "half",
                   sites = [0, 1]         or an explicit A-site list
    [sweep]        quantities = ["S2"]    see sweep.FAMILY_QUANTITIES
                   lambdas = [0.01]
                   sizes = [8, 10]
                   seed = 7
                   threads = 1
                   xi = 1.0               enables the area-bound row
    [cumulants]    n_max = 4
                   lambda_probes = [0.02, 0.01, 0.005]
                   beta_points = 16
                   beta_span = [5.0, 20.0]
"""

import hashlib
import json

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .errors import ConfigError
from .lattice import Bipartition

SPIN_FAMILIES = ("tfim", "xxz", "dimer_hopping", "two_qubit")
ALL_FAMILIES = SPIN_FAMILIES + ("fermion_dimer", "boson_chain", "tight_binding")


def load_config(path: str) -> dict:
    try:
        with open(path, "rb") as f:
            return tomllib.load(f)
    except FileNotFoundError:
        raise ConfigError(path, "config file not found")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(path, f"invalid TOML: {exc}")


def lookup(cfg: dict, key_path: str, default=...):
    """Fetch a dotted key; raises ConfigError when required and missing."""
    node = cfg
    for part in key_path.split("."):
        if not isinstance(node, dict) or part not in node:
            if default is ...:
                raise ConfigError(key_path, "required key missing")
            return default
        node = node[part]
    return node


def expect_type(cfg: dict, key_path: str, kind, default=...):
    val = lookup(cfg, key_path, default)
    if val is default and default is not ...:
        return val
    if kind is float and isinstance(val, int) and not isinstance(val, bool):
        val = float(val)
    if not isinstance(val, kind) or isinstance(val, bool) and kind is not bool:
        raise ConfigError(key_path, f"expected {kind.__name__}, got {type(val).__name__}")
    return val


def family_name(cfg: dict) -> str:
    name = expect_type(cfg, "model.name", str)
    if name not in ALL_FAMILIES:
        raise ConfigError("model.name", f"unknown family {name!r}; known: {list(ALL_FAMILIES)}")
    return name


def model_params(cfg: dict) -> dict:
    params = lookup(cfg, "model.params", {})
    if not isinstance(params, dict):
        raise ConfigError("model.params", "expected a table")
    return dict(params)


def bipartition_rule(cfg: dict):
    """'half', an int cut index, or an explicit site tuple."""
    sites = lookup(cfg, "bipartition.sites", None)
    if sites is not None:
        if not isinstance(sites, list) or not all(isinstance(s, int) for s in sites):
            raise ConfigError("bipartition.sites", "expected a list of site indices")
        return tuple(sites)
    cut = lookup(cfg, "bipartition.cut", "half")
    if cut == "half":
        return "half"
    if isinstance(cut, int) and not isinstance(cut, bool):
        return cut
    raise ConfigError("bipartition.cut", "expected an integer cut index or 'half'")


def resolve_bipartition(rule, num_sites: int) -> Bipartition:
    if rule == "half":
        return Bipartition(region_a=tuple(range(num_sites // 2)), num_sites=num_sites)
    if isinstance(rule, int):
        if not 0 < rule < num_sites:
            raise ConfigError("bipartition.cut", f"cut {rule} does not split {num_sites} sites")
        return Bipartition(region_a=tuple(range(rule)), num_sites=num_sites)
    return Bipartition(region_a=rule, num_sites=num_sites)


def config_hash(cfg: dict, seed: int) -> str:
    blob = json.dumps({"config": cfg, "seed": seed}, sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]
