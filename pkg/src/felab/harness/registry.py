"""String ids for every law the runner can build, with JSON parameter schemas."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import jsonschema
import numpy as np

from felab.classical import (
    ClauseModel,
    MixtureXi,
    brw_law,
    csp_law,
    ea_pattern,
    general_variance_pspin_law,
    goe_law,
    grem_law,
    ising_law,
    mixed_pspin_law,
    multispecies_law,
    orth_inv_sk_law,
    perceptron_law,
    random_field_law,
    rfim_law,
    spiked_matrix_law,
    two_replica_law,
)
from felab.classical.distributions import increment_law_from_dict, spectral_law_from_dict
from felab.core import hypercube, sphere, two_point_law, zero_law
from felab.quantum import qsk_law, syk_law
from felab.quantum.clifford import JORDAN_WIGNER, LEFT_REGULAR
from felab.quantum.hamiltonians import mixed_clifford_tensor_hamiltonian_law

CLASSICAL = "classical"
QUANTUM = "quantum"


class RegistryError(KeyError):
    pass


@dataclass(frozen=True)
class ModelSpec:
    id: str
    family: str
    topic: str
    description: str
    properties: dict
    required: tuple
    build: Callable[[dict], object]

    @property
    def schema(self) -> dict:
        return {
            "type": "object",
            "properties": self.properties,
            "required": list(self.required),
            "additionalProperties": False,
        }


# ---------------------------------------------------------------- schema fragments

POS_INT = {"type": "integer", "minimum": 1}
NUMBER = {"type": "number"}
NONNEG = {"type": "number", "minimum": 0}
XI = {"type": "array", "items": NONNEG, "description": "coefficients c_1..c_P of xi(x) = sum c_p x^p"}
DIMS = {"type": "array", "items": POS_INT, "minItems": 1}
INCREMENT = {
    "type": "object",
    "properties": {"kind": {"enum": ["gaussian", "bernoulli_pm", "uniform", "discrete", "point"]}, "params": {"type": "array"}},
    "required": ["kind"],
    "additionalProperties": False,
}
SPECTRAL = {
    "type": "object",
    "properties": {"kind": {"enum": ["semicircle", "two_atoms", "uniform", "point", "empirical"]}, "params": {"type": "array"}},
    "required": ["kind"],
    "additionalProperties": False,
}
CUBE_OR_SPHERE = {"enum": ["hypercube", "sphere"]}


def _space_arg(p):
    return None if p.get("space", "hypercube") == "hypercube" else "sphere"


def _pattern(p):
    return {int(k): np.asarray(v, dtype=float) for k, v in p["pattern"].items()}


def _clause(p):
    return ClauseModel(
        k=p["k"],
        alpha=p["alpha"],
        clause_type=p.get("clause_type", "ksat"),
        table=tuple(p["table"]) if "table" in p else None,
        m_mode=p.get("m_mode", "fixed"),
    )


_SPECS = [
    ModelSpec(
        "sk",
        CLASSICAL,
        "mean-field spin glass",
        "Sherrington-Kirkpatrick: 2-spin Gaussian couplings including the diagonal",
        {"N": POS_INT, "beta": NUMBER},
        ("N",),
        lambda p: mixed_pspin_law(p["N"], MixtureXi((0.0, 1.0)), p.get("beta", 1.0)),
    ),
    ModelSpec(
        "mixed_pspin",
        CLASSICAL,
        "mean-field spin glass",
        "mixed p-spin with covariance N xi(overlap) on the hypercube or sphere",
        {"N": POS_INT, "xi": XI, "beta": NUMBER, "space": CUBE_OR_SPHERE},
        ("N", "xi"),
        lambda p: mixed_pspin_law(p["N"], MixtureXi(tuple(p["xi"])), p.get("beta", 1.0), _space_arg(p)),
    ),
    ModelSpec(
        "edwards_anderson",
        CLASSICAL,
        "general variance p-spin",
        "nearest-neighbour Gaussian couplings on a lattice",
        {"dims": DIMS, "periodic": {"type": "boolean"}, "weight": NONNEG, "beta": NUMBER, "space": CUBE_OR_SPHERE},
        ("dims",),
        lambda p: general_variance_pspin_law(
            int(np.prod(p["dims"])),
            ea_pattern(p["dims"], p.get("periodic", True), p.get("weight", 1.0)),
            p.get("beta", 1.0),
            _space_arg(p),
        ),
    ),
    ModelSpec(
        "multispecies",
        CLASSICAL,
        "multi-species spherical",
        "spherical p-spin on a product of spheres with species-dependent variances",
        {
            "block_sizes": DIMS,
            "pattern": {"type": "object", "description": "degree p -> nested list of shape (r,)*p"},
            "beta": NUMBER,
        },
        ("block_sizes", "pattern"),
        lambda p: multispecies_law(p["block_sizes"], _pattern(p), p.get("beta", 1.0)),
    ),
    ModelSpec(
        "two_replica",
        CLASSICAL,
        "constrained pairs",
        "H(s1) + H(s2) on sphere pairs with fixed overlap R",
        {"N": POS_INT, "xi": XI, "R": {"type": "number", "minimum": -1, "maximum": 1}, "beta": NUMBER},
        ("N", "xi", "R"),
        lambda p: two_replica_law(p["N"], MixtureXi(tuple(p["xi"])), p["R"], p.get("beta", 1.0)),
    ),
    ModelSpec(
        "grem",
        CLASSICAL,
        "hierarchical",
        "generalized random energy model on the leaves of a regular tree",
        {"d": POS_INT, "depth": POS_INT, "levels": {"type": "array", "items": INCREMENT, "minItems": 1}, "beta": NUMBER},
        ("d", "depth", "levels"),
        lambda p: grem_law(p["d"], p["depth"], [increment_law_from_dict(x) for x in p["levels"]], p.get("beta", 1.0)),
    ),
    ModelSpec(
        "brw",
        CLASSICAL,
        "hierarchical",
        "branching random walk: i.i.d. edge increments summed along root-leaf paths",
        {"d": POS_INT, "depth": POS_INT, "nu": INCREMENT, "beta": NUMBER},
        ("d", "depth", "nu"),
        lambda p: brw_law(p["d"], p["depth"], increment_law_from_dict(p["nu"]), p.get("beta", 1.0)),
    ),
    ModelSpec(
        "csp",
        CLASSICAL,
        "constraint satisfaction",
        "random k-SAT / NAE-SAT / custom clauses with negated literals",
        {
            "N": POS_INT,
            "k": POS_INT,
            "alpha": NONNEG,
            "clause_type": {"enum": ["ksat", "nae_ksat", "custom"]},
            "table": {"type": "array", "items": NONNEG},
            "m_mode": {"enum": ["fixed", "poisson"]},
            "beta": NUMBER,
        },
        ("N", "k", "alpha"),
        lambda p: csp_law(p["N"], _clause(p), p.get("beta", 1.0)),
    ),
    ModelSpec(
        "perceptron",
        CLASSICAL,
        "constraint satisfaction",
        "perceptron -beta sum_a phi(<g_a, sigma>/sqrt(N)) with Gaussian patterns",
        {"N": POS_INT, "alpha": NONNEG, "phi": {"enum": ["zero", "square", "relu_neg", "step_neg"]}, "beta": NUMBER, "spherical": {"type": "boolean"}},
        ("N", "alpha"),
        lambda p: perceptron_law(p["N"], p["alpha"], p.get("phi", "relu_neg"), p.get("beta", 1.0), p.get("spherical", False)),
    ),
    ModelSpec(
        "random_field",
        CLASSICAL,
        "random field",
        "independent sign-symmetric fields sum_i h_i sigma_i",
        {"n_sites": POS_INT, "h": INCREMENT, "beta": NUMBER},
        ("n_sites", "h"),
        lambda p: random_field_law(p["n_sites"], increment_law_from_dict(p["h"]), p.get("beta", 1.0)),
    ),
    ModelSpec(
        "ising",
        CLASSICAL,
        "random field",
        "deterministic nearest-neighbour ferromagnet (not invariant)",
        {"dims": DIMS, "J0": NUMBER, "beta": NUMBER, "periodic": {"type": "boolean"}},
        ("dims",),
        lambda p: ising_law(p["dims"], p.get("J0", 1.0), p.get("beta", 1.0), p.get("periodic", True)),
    ),
    ModelSpec(
        "rfim",
        CLASSICAL,
        "random field",
        "random field Ising model: random field plus ferromagnet",
        {"dims": DIMS, "h": INCREMENT, "J0": NUMBER, "beta": NUMBER, "periodic": {"type": "boolean"}},
        ("dims", "h"),
        lambda p: rfim_law(p["dims"], increment_law_from_dict(p["h"]), p.get("J0", 1.0), p.get("beta", 1.0), p.get("periodic", True)),
    ),
    ModelSpec(
        "orth_inv_sk",
        CLASSICAL,
        "orthogonally invariant",
        "SK with couplings O diag(lambda) O^T, Haar O",
        {"N": POS_INT, "nu": SPECTRAL, "beta": NUMBER},
        ("N", "nu"),
        lambda p: orth_inv_sk_law(p["N"], spectral_law_from_dict(p["nu"]), p.get("beta", 1.0)),
    ),
    ModelSpec(
        "goe",
        CLASSICAL,
        "spiked matrix",
        "quadratic form of a GOE matrix",
        {"N": POS_INT, "beta": NUMBER, "space": CUBE_OR_SPHERE},
        ("N",),
        lambda p: goe_law(p["N"], p.get("beta", 1.0), None if _space_arg(p) is None else sphere(p["N"])),
    ),
    ModelSpec(
        "spiked_matrix",
        CLASSICAL,
        "spiked matrix",
        "noise quadratic form plus a rank-one spike <sigma, v>^2",
        {
            "N": POS_INT,
            "noise": {"oneOf": [{"enum": ["gaussian_goe", "none"]}, SPECTRAL]},
            "spike": {"enum": ["uniform_cube", "uniform_sphere"]},
            "beta": NUMBER,
            "snr": NUMBER,
            "space": CUBE_OR_SPHERE,
        },
        ("N",),
        lambda p: spiked_matrix_law(
            p["N"],
            spectral_law_from_dict(p["noise"]) if isinstance(p.get("noise"), dict) else p.get("noise", "gaussian_goe"),
            p.get("spike", "uniform_cube"),
            p.get("beta", 1.0),
            p.get("snr", 1.0),
            p.get("space", "hypercube"),
        ),
    ),
    ModelSpec(
        "two_point",
        CLASSICAL,
        "counterexample",
        "deterministic H(+1) = 0, H(-1) = x on two points (not invariant)",
        {"x": NUMBER},
        ("x",),
        lambda p: two_point_law(p["x"]),
    ),
    ModelSpec(
        "zero",
        CLASSICAL,
        "reference",
        "the zero Hamiltonian on the hypercube",
        {"N": POS_INT},
        ("N",),
        lambda p: zero_law(hypercube(p["N"])),
    ),
    ModelSpec(
        "qsk",
        QUANTUM,
        "quantum spin glass",
        "quantum SK: 2-spin sigma^z couplings plus random transverse fields",
        {"m": POS_INT, "beta": NUMBER, "h": NUMBER},
        ("m",),
        lambda p: qsk_law(p["m"], p.get("beta", 1.0), p.get("h", 1.0)),
    ),
    ModelSpec(
        "syk",
        QUANTUM,
        "quantum spin glass",
        "SYK: Gaussian even-degree polynomials in Clifford generators",
        {
            "n": POS_INT,
            "q": {"oneOf": [POS_INT, {"type": "array", "items": POS_INT, "minItems": 1}]},
            "beta": NUMBER,
            "rep": {"enum": [JORDAN_WIGNER, LEFT_REGULAR]},
        },
        ("n",),
        lambda p: syk_law(p["n"], p.get("q", 4), None, p.get("rep", JORDAN_WIGNER), p.get("beta", 1.0)),
    ),
    ModelSpec(
        "mixed_clifford",
        QUANTUM,
        "quantum spin glass",
        "Gaussian combination of tensor products of even Clifford monomials",
        {"block_sizes": DIMS, "degree_caps": DIMS, "beta": NUMBER},
        ("block_sizes", "degree_caps"),
        lambda p: mixed_clifford_tensor_hamiltonian_law(p["block_sizes"], p["degree_caps"], None, p.get("beta", 1.0)),
    ),
]


REGISTRY = {spec.id: spec for spec in _SPECS}


def get_model(model_id: str) -> ModelSpec:
    try:
        return REGISTRY[model_id]
    except KeyError:
        raise RegistryError(f"unknown model id {model_id!r}") from None


def build_law(model_id: str, params: dict):
    """Validate ``params`` against the model schema and build the law."""
    spec = get_model(model_id)
    jsonschema.validate(params, spec.schema)
    return spec.build(dict(params))


def is_quantum(model_id: str) -> bool:
    return get_model(model_id).family == QUANTUM


def list_models() -> list[dict]:
    return [
        {"id": s.id, "family": s.family, "topic": s.topic, "description": s.description, "params": s.schema}
        for s in sorted(_SPECS, key=lambda s: s.id)
    ]
