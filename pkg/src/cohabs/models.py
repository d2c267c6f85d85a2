"""Hamiltonian and dissipator constructors driven by a declarative ModelSpec.

Couplings and angular frequencies are quoted in units of the linear coupling
g1 (which fixes the time unit); the scaled time used for reporting is
tau = g_hi * t where g_hi is the coupling of the highest-order interaction.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from . import hilbert
from .errors import ConfigError, DimensionError, LayoutError, TruncationError
from .hilbert import Operator, SpaceLayout

ABSORBER_LABEL = "absorber"
OSC_LABEL = "osc"
PUMP_LABEL = "pump"


@dataclass(frozen=True)
class Interaction:
    order: int
    coupling: float

    def __post_init__(self):
        if self.order < 1:
            raise ConfigError(f"interaction order must be >= 1, got {self.order}")
        if not math.isfinite(self.coupling):
            raise ConfigError(f"interaction coupling must be finite, got {self.coupling}")


@dataclass(frozen=True)
class ModelSpec:
    """Declarative model description; serializable to a JSON document."""

    interactions: tuple[Interaction, ...]
    absorber: str = "qubit"                 # "qubit" | "oscillator"
    absorber_dim: int = 2
    omega: float = 0.0                      # oscillator frequency
    Omega: float = 0.0                      # absorber frequency
    Delta: float | None = None              # detuning; replaces omega term by -Delta*n
    nu: float | None = None                 # pump-mode frequency (three-mode model)
    dephasing_rate: float = 0.0
    pump: complex | None = None             # pump amplitude; presence adds a third factor
    pump_dim: int | None = None
    cutoff: int = 60

    def __post_init__(self):
        if self.absorber not in ("qubit", "oscillator"):
            raise ConfigError(f"absorber must be 'qubit' or 'oscillator', got {self.absorber!r}")
        if not self.interactions:
            raise ConfigError("model needs at least one interaction")
        if self.dephasing_rate < 0:
            raise ConfigError(f"dephasing rate must be >= 0, got {self.dephasing_rate}")
        if self.cutoff < 2:
            raise DimensionError(f"Fock cutoff must be >= 2, got {self.cutoff}")
        if self.absorber == "oscillator" and self.absorber_dim < 2:
            raise DimensionError("oscillator absorber needs dimension >= 2")
        orders = [i.order for i in self.interactions]
        if len(set(orders)) != len(orders):
            raise ConfigError(f"duplicate interaction orders: {orders}")

    # -- geometry ----------------------------------------------------------

    @property
    def has_pump(self) -> bool:
        return self.pump is not None

    def effective_pump_dim(self) -> int:
        if self.pump_dim is not None:
            return self.pump_dim
        # floor of nb + 5 sqrt(nb+1), padded so the coherent tail clears the
        # 1e-6 truncation guard at small amplitudes too
        nb = abs(self.pump) ** 2 if self.pump is not None else 0.0
        return max(8, int(math.ceil(nb + 5.0 * math.sqrt(nb + 1.0))) + 2)

    def layout(self) -> SpaceLayout:
        dim_abs = 2 if self.absorber == "qubit" else self.absorber_dim
        factors = [(ABSORBER_LABEL, dim_abs), (OSC_LABEL, self.cutoff)]
        if self.has_pump:
            factors.append((PUMP_LABEL, self.effective_pump_dim()))
        return SpaceLayout(tuple(factors))

    def coupling(self, order: int) -> float:
        for it in self.interactions:
            if it.order == order:
                return it.coupling
        raise ConfigError(f"model has no interaction of order {order}")

    def tau_scale(self) -> float:
        """Coupling of the highest-order interaction; 1.0 if it vanishes."""
        hi = max(self.interactions, key=lambda it: it.order)
        return abs(hi.coupling) if hi.coupling != 0.0 else 1.0

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        d = {
            "absorber": self.absorber,
            "interactions": [[it.order, it.coupling] for it in self.interactions],
            "omega": self.omega,
            "Omega": self.Omega,
            "dephasing_rate": self.dephasing_rate,
            "cutoff": self.cutoff,
        }
        if self.absorber == "oscillator":
            d["absorber_dim"] = self.absorber_dim
        if self.Delta is not None:
            d["Delta"] = self.Delta
        if self.nu is not None:
            d["nu"] = self.nu
        if self.pump is not None:
            d["pump"] = [self.pump.real, self.pump.imag] if isinstance(self.pump, complex) \
                else float(self.pump)
        if self.pump_dim is not None:
            d["pump_dim"] = self.pump_dim
        return d

    @staticmethod
    def from_dict(d: dict) -> "ModelSpec":
        try:
            inter = tuple(Interaction(int(k), float(g)) for k, g in d["interactions"])
            pump = d.get("pump")
            if isinstance(pump, (list, tuple)):
                pump = complex(pump[0], pump[1])
            elif pump is not None:
                pump = complex(pump)
            return ModelSpec(
                interactions=inter,
                absorber=d.get("absorber", "qubit"),
                absorber_dim=int(d.get("absorber_dim", 2)),
                omega=float(d.get("omega", 0.0)),
                Omega=float(d.get("Omega", 0.0)),
                Delta=None if d.get("Delta") is None else float(d["Delta"]),
                nu=None if d.get("nu") is None else float(d["nu"]),
                dephasing_rate=float(d.get("dephasing_rate", 0.0)),
                pump=pump,
                pump_dim=None if d.get("pump_dim") is None else int(d["pump_dim"]),
                cutoff=int(d.get("cutoff", 60)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad model document: {exc}") from exc


# ---------------------------------------------------------------------------
# interaction builders

def _osc_power(k: int, cutoff: int) -> np.ndarray:
    b = hilbert.annihilation(cutoff, OSC_LABEL).entries
    return np.linalg.matrix_power(b, k)


def jc_interaction(k: int, g: float, spec: ModelSpec) -> Operator:
    """Excitation-exchange coupling g (sigma+ b^k + sigma- b^dag^k).

    Annihilates |g, m> for m < k; requires a qubit absorber and k < cutoff.
    """
    if spec.absorber != "qubit":
        raise LayoutError("jc_interaction requires a qubit absorber")
    if k >= spec.cutoff:
        raise TruncationError(f"interaction order k={k} does not fit cutoff {spec.cutoff}")
    sp, sm, _ = hilbert.qubit_operators(ABSORBER_LABEL)
    bk = _osc_power(k, spec.cutoff)
    lay = spec.layout()
    mat = g * (np.kron(sp.entries, bk) + np.kron(sm.entries, bk.conj().T))
    if spec.has_pump:
        mat = np.kron(mat, np.eye(spec.effective_pump_dim()))
    return Operator(lay, mat, True)


def combined_interaction(g1: float, g2: float, spec: ModelSpec) -> Operator:
    """Sum of the linear (k=1) and quadratic (k=2) exchange interactions."""
    return jc_interaction(1, g1, spec) + jc_interaction(2, g2, spec)


def mw_interaction(k: int, g: float, spec: ModelSpec) -> Operator:
    """Mixer coupling g (a^dag b^k + a b^dag^k) for an oscillator absorber.

    Commutes with k a^dag a + b^dag b away from the truncation boundary.
    """
    if spec.absorber != "oscillator":
        raise LayoutError("mw_interaction requires an oscillator absorber")
    if k >= spec.cutoff:
        raise TruncationError(f"interaction order k={k} does not fit cutoff {spec.cutoff}")
    a = hilbert.annihilation(spec.absorber_dim, ABSORBER_LABEL).entries
    bk = _osc_power(k, spec.cutoff)
    mat = g * (np.kron(a.conj().T, bk) + np.kron(a, bk.conj().T))
    return Operator(spec.layout(), mat, True)


def completed_interaction(g1: float, g2: float, spec: ModelSpec) -> Operator:
    """Three-mode completion g1 (sigma+ b a + h.c.) + g2 (sigma+ b^2 + h.c.).

    Requires the qubit (x) oscillator (x) pump layout; the trilinear term
    draws the linear absorption's energy from the pump mode.
    """
    if not spec.has_pump:
        raise LayoutError("completed_interaction needs a pump factor (set spec.pump)")
    if spec.absorber != "qubit":
        raise LayoutError("completed_interaction requires a qubit absorber")
    da = spec.effective_pump_dim()
    sp, sm, _ = hilbert.qubit_operators(ABSORBER_LABEL)
    b = hilbert.annihilation(spec.cutoff, OSC_LABEL).entries
    a = hilbert.annihilation(da, PUMP_LABEL).entries
    b2 = b @ b
    tri = np.kron(np.kron(sp.entries, b), a)
    quad = np.kron(np.kron(sp.entries, b2), np.eye(da))
    mat = g1 * (tri + tri.conj().T) + g2 * (quad + quad.conj().T)
    return Operator(spec.layout(), mat, True)


# ---------------------------------------------------------------------------
# free Hamiltonians and conserved quantities

def free_hamiltonian(omega: float, Omega: float, spec: ModelSpec) -> Operator:
    """H0 = omega b^dag b + absorber term ((Omega/2) sigma_z or Omega a^dag a)."""
    lay = spec.layout()
    n_osc = hilbert.embed(hilbert.number_operator(spec.cutoff, OSC_LABEL), lay)
    if spec.absorber == "qubit":
        _, _, sz = hilbert.qubit_operators(ABSORBER_LABEL)
        habs = hilbert.embed(sz, lay) * (0.5 * Omega)
    else:
        habs = hilbert.embed(hilbert.number_operator(spec.absorber_dim, ABSORBER_LABEL),
                             lay) * Omega
    h = n_osc * omega + habs
    if spec.has_pump and spec.nu:
        h = h + hilbert.embed(hilbert.number_operator(spec.effective_pump_dim(),
                                                      PUMP_LABEL), lay) * spec.nu
    return h


def detuned_hamiltonian(Delta: float, Omega: float, k: int, g: float,
                        spec: ModelSpec) -> Operator:
    """H = -Delta b^dag b + (Omega/2) sigma_z + V^(k); keeps Fock-diagonal
    reduced states diagonal for any detuning."""
    return free_hamiltonian(-Delta, Omega, spec) + jc_interaction(k, g, spec)


def build_hamiltonian(spec: ModelSpec) -> Operator:
    """Full Hamiltonian for the spec: free part plus every listed interaction."""
    omega = -spec.Delta if spec.Delta is not None else spec.omega
    h = free_hamiltonian(omega, spec.Omega, spec)
    for it in spec.interactions:
        if spec.has_pump:
            if it.order == 1:
                h = h + completed_interaction(it.coupling, 0.0, spec)
            elif it.order == 2:
                h = h + completed_interaction(0.0, it.coupling, spec)
            else:
                raise ConfigError("pumped model supports interaction orders 1 and 2 only")
        elif spec.absorber == "qubit":
            h = h + jc_interaction(it.order, it.coupling, spec)
        else:
            h = h + mw_interaction(it.order, it.coupling, spec)
    return h


def excitation_number(k: int, spec: ModelSpec) -> Operator:
    """N = k P_excited + b^dag b (qubit) or k a^dag a + b^dag b (oscillator)."""
    lay = spec.layout()
    n_osc = hilbert.embed(hilbert.number_operator(spec.cutoff, OSC_LABEL), lay)
    if spec.absorber == "qubit":
        sp, sm, _ = hilbert.qubit_operators(ABSORBER_LABEL)
        proj = Operator(sp.layout, sp.entries @ sm.entries, True)
        return n_osc + hilbert.embed(proj, lay) * float(k)
    n_abs = hilbert.embed(hilbert.number_operator(spec.absorber_dim, ABSORBER_LABEL), lay)
    return n_osc + n_abs * float(k)


def commutator_residual(h0: Operator, v: Operator, k: int, g: float,
                        omega: float, Omega: float) -> tuple[Operator, float]:
    """[H0, V] together with its max-abs entry.

    For a single order-k exchange interaction the commutator equals
    g (k omega - Omega) (sigma- b^dag^k - sigma+ b^k) entrywise, vanishing
    exactly on resonance Omega = k omega.
    """
    if h0.layout != v.layout:
        raise LayoutError("commutator_residual needs operators on the same layout")
    comm = h0.commutator(v)
    return comm, float(np.max(np.abs(comm.entries)))


def frustration_reference(k: int, g: float, omega: float, Omega: float,
                          spec: ModelSpec) -> Operator:
    """Closed form g (k omega - Omega)(sigma- b^dag^k - sigma+ b^k)."""
    sp, sm, _ = hilbert.qubit_operators(ABSORBER_LABEL)
    bk = _osc_power(k, spec.cutoff)
    mat = g * (k * omega - Omega) * (
        np.kron(sm.entries, bk.conj().T) - np.kron(sp.entries, bk))
    if spec.has_pump:
        mat = np.kron(mat, np.eye(spec.effective_pump_dim()))
    return Operator.create(spec.layout(), mat)


# ---------------------------------------------------------------------------
# dissipators

def dephasing_dissipator(gamma: float, spec: ModelSpec) -> list[Operator]:
    """Number dephasing on the oscillator: a single jump operator sqrt(gamma) b^dag b."""
    if gamma < 0:
        raise ConfigError(f"dephasing rate must be >= 0, got {gamma}")
    if gamma == 0.0:
        return []
    lay = spec.layout()
    n_osc = hilbert.embed(hilbert.number_operator(spec.cutoff, OSC_LABEL), lay)
    return [n_osc * math.sqrt(gamma)]
