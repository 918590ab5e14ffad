"""Named numerical checks with a machine-readable report.

Each check returns a :class:`CheckResult`.  Controls are checks expected to
fail; they document formulas that do *not* hold (a non-Poisson matrix, a
mis-printed Casimir, a mis-printed equation of motion).
"""

from __future__ import annotations

import json
import math
import zlib
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import brackets as br
from . import dynamics as dyn
from . import hamiltonians as ham
from . import symmetry as sym
from .core import FULL_LABELS, Params, Vec2, on_surface

SUITES = ("algebra", "brackets", "hamiltonians", "dynamics", "reduction")


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float
    tolerance: float
    n_samples: int
    notes: str = ""
    suite: str = ""
    expected_fail: bool = False

    @property
    def ok(self) -> bool:
        """True when the outcome is the expected one (controls must fail)."""
        return self.passed != self.expected_fail

    def to_json(self) -> str:
        d = asdict(self)
        d["ok"] = self.ok
        return json.dumps(d, sort_keys=True)


@dataclass(frozen=True)
class _Check:
    name: str
    suite: str
    tolerance: float
    fn: Callable
    expected_fail: bool


REGISTRY: dict[str, _Check] = {}


def check(name: str, suite: str, tolerance: float, expected_fail: bool = False):
    def deco(fn):
        if name in REGISTRY:
            raise ValueError(f"duplicate check {name}")
        REGISTRY[name] = _Check(name, suite, tolerance, fn, expected_fail)
        return fn

    return deco


@dataclass
class Context:
    params: Params
    seed: int
    rng: np.random.Generator
    cache: dict = field(default_factory=dict)

    def rng_for(self, tag: str) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence([self.seed, zlib.crc32(tag.encode())]))

    @property
    def z0(self) -> np.ndarray:
        """Shared on-surface initial state, regular (p0 and xdot bounded away from zero)."""
        if "z0" not in self.cache:
            r = self.rng_for("initial_state")
            while True:
                z = on_surface(r.uniform(-2, 2, 8), self.params)
                if np.hypot(*z[4:6]) > 0.5 and np.hypot(*z[2:4]) > 0.5:
                    break
            self.cache["z0"] = z
        return self.cache["z0"]

    def run(self, form, y0=None, dt=1e-3, t_end=10.0, method="rk4", params=None) -> dyn.Trajectory:
        form = dyn.Formulation(form)
        params = params or self.params
        if y0 is None:
            y0 = self.z0 if params == self.params else on_surface(self.z0, params)
            if form is dyn.Formulation.DARBOUX_CANONICAL_H:
                y0 = sym.darboux_forward(y0, params)[:6]
            elif form is dyn.Formulation.REDUCED_LIE_POISSON:
                y0 = sym.invariants_dirac(y0, params)
        key = (form, tuple(np.round(y0, 17)), dt, t_end, method, params)
        if key not in self.cache:
            self.cache[key] = dyn.integrate(form, y0, params, dt, t_end, method)
        return self.cache[key]


# -- samplers ------------------------------------------------------------------

def sample_full(rng, n: int, params: Params | None = None, surface: bool = False) -> np.ndarray:
    """Uniform on [-2, 2]^8 with |p0| >= 0.1; optionally projected onto the constraint surface."""
    z = rng.uniform(-2, 2, (n, 8))
    bad = np.hypot(z[:, 4], z[:, 5]) < 0.1
    while bad.any():
        z[bad] = rng.uniform(-2, 2, (int(bad.sum()), 8))
        bad = np.hypot(z[:, 4], z[:, 5]) < 0.1
    return on_surface(z, params) if surface else z


def sample_reduced(rng, n: int) -> np.ndarray:
    z = sample_full(rng, n)
    return np.column_stack([rng.uniform(-2, 2, (n, 3)), z[:, 4] ** 2 + z[:, 5] ** 2])


def _max(values) -> float:
    return float(np.max(np.abs(np.asarray(values, float))))


def _needs_positive_lambda(ctx) -> bool:
    return ctx.params.lam > 0


NA = (0.0, 0, "not applicable: Darboux chart needs lambda > 0")

# -- algebra -------------------------------------------------------------------


@check("se2_generator_brackets", "algebra", 1e-9)
def _(ctx):
    res = 0.0
    for fields, dim in ((sym.generators_plane(), 2), (sym.tangent_lifts(), 4), (sym.cotangent_lifts(), 8)):
        R, X, Y = fields
        for z in ctx.rng.uniform(-2, 2, (100, dim)):
            res = max(
                res,
                _max(sym.generator_bracket(R, X, z) - Y(z)),
                _max(sym.generator_bracket(R, Y, z) + X(z)),
                _max(sym.generator_bracket(X, Y, z)),
            )
    return res, 300, "[R,X]=Y, [R,Y]=-X, [X,Y]=0 on M, TM, T*TM (algebra bracket = -commutator)"


@check("se2_momentum_lie_poisson_TM", "algebra", 1e-12)
def _(ctx):
    P = -br.canonical_matrix(2)  # dp0^dx on (x, y, p0x, p0y)
    res = 0.0
    for x, y, px, py in ctx.rng.uniform(-2, 2, (100, 4)):
        G = np.array([[py, -px, -y, x], [0, 0, 1, 0], [0, 0, 0, 1]], float)
        M = G @ P @ G.T
        res = max(res, _max(M - br.se2_lie_poisson(sym.momentum_map_cotangent_plane((x, y), (px, py)))))
    return res, 100, "brackets of (x cross p0, p0) under dp0^dx"


@check("se2_momentum_lie_poisson_TTM", "algebra", 1e-12)
def _(ctx):
    PC = br.canonical_bracket()
    J = (sym.angular_momentum(), sym.linear_momentum(0), sym.linear_momentum(1))
    res = 0.0
    for z in sample_full(ctx.rng, 100):
        M = np.array([[br.bracket_of_functions(PC, a, b, z) for b in J] for a in J])
        res = max(res, _max(M + br.se2_lie_poisson(sym.momentum_map_full(z))))
    return res, 100, "P_C brackets of (mu, p0) give the minus Lie-Poisson sign ({x,p0}=+1 convention)"


@check("cotangent_lifts_hamiltonian", "algebra", 1e-12)
def _(ctx):
    PC = br.canonical_bracket()
    J = (sym.angular_momentum(), sym.linear_momentum(0), sym.linear_momentum(1))
    res = 0.0
    for z in sample_full(ctx.rng, 100):
        for F, f in zip(sym.cotangent_lifts(), J):
            res = max(res, _max(PC(z) @ f.grad(z) - F(z)))
    return res, 100, "P_C grad(mu, p0x, p0y) = lifts of (R, X, Y)"


def _closure(P, fields, z, lsq_over_lam):
    JR, JX, JY = fields
    return max(
        abs(br.bracket_of_functions(P, JR, JX, z) - JY(z)),
        abs(br.bracket_of_functions(P, JR, JY, z) + JX(z)),
        abs(br.bracket_of_functions(P, JX, JY, z) - lsq_over_lam),
    )


@check("osclp_closure_canonical", "algebra", 1e-9)
def _(ctx):
    P, f = br.canonical_bracket(), sym.canonical_invariant_fields(ctx.params)
    zs = sample_full(ctx.rng, 1000)
    return max(_closure(P, f, z, sym.cocycle_full(z, ctx.params)) for z in zs), 1000, "J triple under P_C"


@check("osclp_closure_dirac", "algebra", 1e-9)
def _(ctx):
    P, f = br.dirac_bracket(ctx.params), sym.dirac_invariant_fields(ctx.params)
    zs = sample_full(ctx.rng, 1000)
    return max(_closure(P, f, z, sym.cocycle_full(z, ctx.params)) for z in zs), 1000, "J^D triple under P_D"


@check("osc_lift_commutators", "algebra", 1e-9)
def _(ctx):
    FR, FX, FY, FL = sym.dirac_lift_fields(ctx.params)
    res = 0.0
    for z in sample_full(ctx.rng, 200):
        res = max(
            res,
            _max(sym.lie_bracket(FR, FX, z) + FY(z)),
            _max(sym.lie_bracket(FR, FY, z) - FX(z)),
            _max(sym.lie_bracket(FX, FY, z) + FL(z)),
        )
    return res, 200, "[F_R,F_X]=-F_Y, [F_R,F_Y]=F_X, [F_X,F_Y]=-F_l"


@check("osc_lift_central", "algebra", 1e-9)
def _(ctx):
    fields = sym.dirac_lift_fields(ctx.params)
    FL = fields[3]
    zs = sample_full(ctx.rng, 200)
    return max(_max(sym.lie_bracket(FL, F, z)) for z in zs for F in fields), 200, "F_l commutes with all"


@check("dirac_lifts_hamiltonian", "algebra", 1e-12)
def _(ctx):
    P = br.dirac_bracket(ctx.params)
    gens = sym.dirac_invariant_fields(ctx.params) + (sym.lsq_over_lambda(ctx.params),)
    res = 0.0
    for z in sample_full(ctx.rng, 100):
        for F, J in zip(sym.dirac_lift_fields(ctx.params), gens):
            res = max(res, _max(F(z) - P(z) @ J.grad(z)))
    return res, 100, "F = P_D grad J for J in (J_R^D, J_X^D, J_Y^D, l^2/lam)"


@check("dirac_lifts_printed_components", "algebra", 1e-12)
def _(ctx):
    res = 0.0
    for z in sample_full(ctx.rng, 100):
        full = np.array([F(z)[:6] for F in sym.dirac_lift_fields(ctx.params)])
        res = max(res, _max(full - sym.dirac_lift_printed(z, ctx.params)))
    return res, 100, "quoted forms are the (x, xdot, p0) components of the lifts"


@check("cocycle_plane_values", "algebra", 1e-12)
def _(ctx):
    expected = np.array([[0, 0, 0], [0, 0, 1], [0, -1, 0]], float)
    pts = ctx.rng.uniform(-2, 2, (100, 2))
    return max(_max(sym.cocycle_matrix_plane(p) - expected) for p in pts), 100, "Theta(X,Y)=1, Theta(Y,R)=Theta(R,X)=0"


@check("cocycle_identity", "algebra", 1e-12)
def _(ctx):
    Th = sym.cocycle_matrix_plane()
    # Theta([a,b], c) cyclic over (X, Y, R), brackets expanded in the (R, X, Y) basis
    C = sym.VF_STRUCTURE
    X, Y, R = 1, 2, 0
    val = C[X, Y] @ Th[:, R] + C[Y, R] @ Th[:, X] + C[R, X] @ Th[:, Y]
    return abs(float(val)), 1, "two-cocycle identity"


_INVARIANT_NAMES = ("J_R", "J_X", "J_Y", "J_R^D", "J_X^D", "J_Y^D", "lsq")


@check("invariants_infinitesimal_invariance", "algebra", 1e-12)
def _(ctx):
    fs = sym.canonical_invariant_fields(ctx.params) + sym.dirac_invariant_fields(ctx.params) + (ham.lsq_full(),)
    res = 0.0
    for z in sample_full(ctx.rng, 100):
        for F in sym.cotangent_lifts():
            for f in fs:
                res = max(res, abs(float(f.grad(z) @ F(z))))
    return res, 100, "dJ . F = 0 for " + ", ".join(_INVARIANT_NAMES)


@check("invariants_group_invariance", "algebra", 1e-12)
def _(ctx):
    res = 0.0
    for z in sample_full(ctx.rng, 100):
        th, a, b = ctx.rng.uniform(-np.pi, np.pi), *ctx.rng.uniform(-2, 2, 2)
        g = sym.GroupElement(th, Vec2(a, b))
        gz = sym.act_on_full(g, z)
        res = max(
            res,
            _max(sym.invariants_canonical(gz, ctx.params) - sym.invariants_canonical(z, ctx.params)),
            _max(sym.invariants_dirac(gz, ctx.params) - sym.invariants_dirac(z, ctx.params)),
        )
    return res, 100, "invariants under finite SE(2) action"


@check("lagrangian_se2_invariance", "algebra", 1e-12)
def _(ctx):
    res = 0.0
    for _ in range(100):
        pos, vel, acc = ctx.rng.uniform(-2, 2, (3, 2))
        g = sym.GroupElement(ctx.rng.uniform(-np.pi, np.pi), Vec2(*ctx.rng.uniform(-2, 2, 2)))
        _, v2, a2 = sym.act_on_jet(g, pos, vel, acc)
        res = max(res, abs(float(ham.lagrangian(v2, a2, ctx.params) - ham.lagrangian(vel, acc, ctx.params))))
    return res, 100, ""


# -- brackets --------------------------------------------------------------------


@check("dirac_constructor_vs_table", "brackets", 1e-12)
def _(ctx):
    lams = [0.5, 1.0, 2.0, -1.0] + list(ctx.rng.uniform(0.1, 3, 20) * ctx.rng.choice([-1, 1], 20))
    res = 0.0
    for lam in lams:
        p = Params(lam, ctx.params.mass)
        built = br.dirac_bracket_from_constraints(br.canonical_bracket(p), br.chiral_constraints(p), sample_full(ctx.rng, 1)[0])
        res = max(res, _max(built - br.dirac_bracket_closed_form(p)(np.zeros(8))))
    return res, len(lams), "lambda in {0.5, 1, 2, -1} and 20 random values"


@check("dirac_table_entries", "brackets", 1e-12)
def _(ctx):
    P, lam = br.dirac_bracket(ctx.params), ctx.params.lam
    want = {
        ("xdot", "ydot"): 1 / lam,
        ("xdot", "p1x"): 0.5,
        ("ydot", "p1y"): 0.5,
        ("p1x", "p1y"): lam / 4,
        ("x", "p0x"): 1.0,
        ("y", "p0y"): 1.0,
        ("ydot", "p1x"): 0.0,
    }
    return max(abs(P.entry(a, b) - v) for (a, b), v in want.items()), len(want), "constructor output at named entries"


def _structures(params):
    out = [br.canonical_bracket(params), br.dirac_bracket(params), br.osc_structure(params), br.se2_structure()]
    if params.lam > 0:
        out.append(br.final_bracket(params))
    return out


def _point_for(P, rng):
    if P.dim == 4:
        return sample_reduced(rng, 1)[0]
    return rng.uniform(-2, 2, P.dim)


@check("antisymmetry_all_structures", "brackets", 0.0)
def _(ctx):
    Ps = _structures(ctx.params)
    res = max(br.check_antisymmetry(P, _point_for(P, ctx.rng)) for P in Ps for _ in range(1000))
    return res, 1000, ", ".join(P.name for P in Ps)


@check("jacobi_all_structures", "brackets", 1e-9)
def _(ctx):
    Ps = _structures(ctx.params)
    res = max(br.check_jacobi(P, _point_for(P, ctx.rng)) for P in Ps for _ in range(1000))
    return res, 1000, ", ".join(P.name for P in Ps)


@check("jacobi_corrupted_control", "brackets", 1e-3, expected_fail=True)
def _(ctx):
    P = br.corrupted_osc_structure(ctx.params)
    res = max(br.check_jacobi(P, s) for s in sample_reduced(ctx.rng, 100))
    return res, 100, "osc* with {jr,jx} replaced by jx*jy must violate Jacobi"


@check("casimir_lsq_se2", "brackets", 1e-12)
def _(ctx):
    P = br.se2_structure()
    c = ham.ScalarField("lsq", 3, lambda u: u[..., 1] ** 2 + u[..., 2] ** 2, lambda u: np.array([0, 2 * u[1], 2 * u[2]]))
    return max(br.check_casimir(P, c, u) for u in ctx.rng.uniform(-2, 2, (100, 3))), 100, ""


@check("casimir_lsq_osc", "brackets", 1e-12)
def _(ctx):
    P = br.osc_structure(ctx.params)
    return max(br.check_casimir(P, ham.lsq_reduced(), s) for s in sample_reduced(ctx.rng, 100)), 100, ""


@check("casimir_paraboloid_block", "brackets", 1e-12)
def _(ctx):
    res = 0.0
    for s in sample_reduced(ctx.rng, 100):
        P = br.osc_block_structure(ctx.params, s[3])
        lam, lsq = ctx.params.lam, s[3]
        c = ham.ScalarField(
            "paraboloid3", 3,
            lambda j: j[..., 1] ** 2 + j[..., 2] ** 2 + 2 * lsq / lam * j[..., 0],
            lambda j: np.array([2 * lsq / lam, 2 * j[1], 2 * j[2]]),
        )
        res = max(res, br.check_casimir(P, c, s[:3]))
    return res, 100, "J_X^2 + J_Y^2 + (2 l^2/lam) J_R on the 3x3 block"


@check("darboux_pullback_canonical", "brackets", 1e-12)
def _(ctx):
    if not _needs_positive_lambda(ctx):
        return NA
    W = sym.darboux_jacobian(ctx.params)
    Pw = W @ br.dirac_bracket(ctx.params)(np.zeros(8)) @ W.T
    want = np.zeros((8, 8))
    want[:6, :6] = br.canonical_matrix(3)
    return _max(Pw - want), 1, "W P_D W^T = canonical on (x,y,q;p0,p), phi block zero"


@check("final_bracket_velocity_chart", "brackets", 1e-12)
def _(ctx):
    idx = [FULL_LABELS.index(n) for n in ("x", "y", "xdot", "p0x", "p0y", "ydot")]
    sub = br.dirac_bracket(ctx.params)(np.zeros(8))[np.ix_(idx, idx)]
    return _max(sub - br.final_bracket(ctx.params, "velocity")(np.zeros(6))), 1, "{xdot,ydot}_f = 1/lam"


# -- hamiltonians ----------------------------------------------------------------


def _all_scalar_fields(params):
    out = [
        ham.canonical_hamiltonian(params),
        ham.dirac_hamiltonian(params),
        ham.reduced_hamiltonian(params),
        ham.lsq_full(),
        ham.lsq_reduced(),
        ham.cylinder_casimir(params),
        ham.printed_casimir(params),
        ham.paraboloid_function(params),
        sym.angular_momentum(),
        sym.lsq_over_lambda(params),
        *sym.canonical_invariant_fields(params),
        *sym.dirac_invariant_fields(params),
        *br.chiral_constraints(params).constraints,
    ]
    if params.lam > 0:
        out.append(ham.final_hamiltonian(params))
    return out


@check("gradients_match_finite_differences", "hamiltonians", 1e-6)
def _(ctx):
    res = 0.0
    fields = _all_scalar_fields(ctx.params)
    for f in fields:
        for z in ctx.rng.uniform(-2, 2, (100, f.dim)):
            g = f.grad(z)
            fd = ham.numerical_gradient(f.value_fn, z)
            res = max(res, _max(g - fd) / max(1.0, _max(g)))
    return res, 100, f"{len(fields)} fields, relative error"


@check("hd_equals_hc_on_surface", "hamiltonians", 1e-12)
def _(ctx):
    z = sample_full(ctx.rng, 1000, ctx.params, surface=True)
    return _max(ham.h_dirac(z, ctx.params) - ham.h_canonical(z, ctx.params)), 1000, ""


@check("hf_darboux_equals_hc", "hamiltonians", 1e-12)
def _(ctx):
    if not _needs_positive_lambda(ctx):
        return NA
    z = sample_full(ctx.rng, 1000, ctx.params, surface=True)
    w = sym.darboux_forward(z, ctx.params)
    return _max(ham.h_final(w, ctx.params) - ham.h_canonical(z, ctx.params)), 1000, ""


@check("hred_dirac_composition", "hamiltonians", 1e-12)
def _(ctx):
    z = sample_full(ctx.rng, 1000)
    s = sym.invariants_canonical(z, ctx.params)
    return _max(ham.h_reduced_dirac(s, ctx.params) - ham.h_dirac(z, ctx.params)), 1000, "off the surface too"


@check("hred_canonical_composition", "hamiltonians", 1e-12)
def _(ctx):
    z = sample_full(ctx.rng, 1000)
    s = sym.invariants_dirac(z, ctx.params)
    return _max(ham.h_reduced_canonical(s, ctx.params) - ham.h_canonical(z, ctx.params)), 1000, ""


@check("h_orbit_on_paraboloid", "hamiltonians", 1e-12)
def _(ctx):
    s = sym.invariants_dirac(sample_full(ctx.rng, 1000), ctx.params)
    h = ham.h_orbit(s[:, 1], s[:, 2], s[:, 3], ctx.params)
    return _max(h - ham.h_reduced_canonical(s, ctx.params)), 1000, ""


@check("energy_equals_hc_via_legendre", "hamiltonians", 1e-12)
def _(ctx):
    vel, acc = ctx.rng.uniform(-2, 2, (2, 1000, 2))
    p0, _ = ham.ostrogradskii_momenta(vel, acc, ctx.params)
    z = np.concatenate([np.zeros_like(vel), vel, p0, np.zeros_like(vel)], axis=-1)
    return _max(ham.energy(vel, acc, ctx.params) - ham.h_canonical(z, ctx.params)), 1000, "E_L = H^C o Legendre"


@check("cylinder_commutes_with_hred", "hamiltonians", 1e-12)
def _(ctx):
    res = 0.0
    for s in sample_reduced(ctx.rng, 1000):
        P = br.osc_lie_poisson(s, ctx.params)
        g1 = ham.cylinder_casimir(ctx.params).grad(s)
        g2 = ham.reduced_hamiltonian(ctx.params).grad(s)
        res = max(res, abs(float(g1 @ P @ g2)))
    return res, 1000, ""


def _printed_he(z, params, p1y_coefficient):
    lam, m = params.lam, params.mass
    x, y, vx, vy, px, py, qx, qy = z
    return np.array(
        [-2 / lam * qy, 2 / lam * qx, -m / lam * vy + py / lam, m / lam * vx - px / lam, 0.0, 0.0,
         -m / lam * qy - px / 2, m / lam * qx - p1y_coefficient * py]
    )


@check("he_equations_on_surface", "hamiltonians", 1e-12)
def _(ctx):
    zs = sample_full(ctx.rng, 100, ctx.params, surface=True)
    res = max(_max(dyn.rhs("canonical_bracket_dirac_h", z, ctx.params) - _printed_he(z, ctx.params, 0.5)) for z in zs)
    return res, 100, "P_C grad H^D matches the quoted equations with dp1y/dt = (m/lam)p1x - p0y/2"


@check("he_printed_p1y_control", "hamiltonians", 1e-3, expected_fail=True)
def _(ctx):
    p = Params(1.0, ctx.params.mass)  # the two coefficients coincide only at lambda = 2
    zs = sample_full(ctx.rng, 100, p, surface=True)
    res = max(_max(dyn.rhs("canonical_bracket_dirac_h", z, p) - _printed_he(z, p, 1 / p.lam)) for z in zs)
    return res, 100, "printed coefficient 1/lam on p0y in dp1y/dt disagrees with P_C grad H^D (lambda=1)"


@check("el_residual_analytic", "hamiltonians", 1e-10)
def _(ctx):
    res = 0.0
    for _ in range(20):
        t = ctx.rng.uniform(0, 10)
        A, B = ctx.rng.uniform(-2, 2, 2)
        p0 = sample_full(ctx.rng, 1)[0, 4:6]
        C0 = ctx.rng.uniform(-2, 2, 2)
        res = max(res, _max(ham.el_residual(dyn.analytic_jet(t, A, B, p0, C0, ctx.params), ctx.params)))
    return res, 20, ""


# -- dynamics --------------------------------------------------------------------

_CONSERVATION_TOL = {"dH": 1e-8, "dmu": 1e-8, "dp0": 1e-13, "max_phi": 1e-8}


def _conservation_check(form, key):
    @check(f"conservation_{form.value}_{key}", "dynamics", _CONSERVATION_TOL[key])
    def _(ctx):
        if form is dyn.Formulation.DARBOUX_CANONICAL_H and not _needs_positive_lambda(ctx):
            return NA
        summary = dyn.conservation_summary(ctx.run(form))
        return summary[key], 10001, "RK4 dt=1e-3 t in [0,10], on-surface start"


for _form in list(dyn.Formulation)[:3]:
    for _key in _CONSERVATION_TOL:
        _conservation_check(_form, _key)


@check("reduced_paraboloid_residual", "dynamics", 1e-8)
def _(ctx):
    return dyn.conservation_summary(ctx.run("reduced_lie_poisson"))["paraboloid"], 10001, ""


@check("reduced_cylinder_drift", "dynamics", 1e-8)
def _(ctx):
    return dyn.conservation_summary(ctx.run("reduced_lie_poisson"))["dcylinder"], 10001, ""


@check("reduced_lsq_constant", "dynamics", 1e-13)
def _(ctx):
    return dyn.conservation_summary(ctx.run("reduced_lie_poisson"))["dlsq"], 10001, ""


@check("formulation_equivalence_positions", "dynamics", 1e-6)
def _(ctx):
    forms = list(dyn.Formulation)[:3] if _needs_positive_lambda(ctx) else list(dyn.Formulation)[:2]
    pos = [dyn.to_full_states(ctx.run(f))[:, :2] for f in forms]
    return max(_max(p - pos[0]) for p in pos), 10001, ", ".join(f.value for f in forms)


def _rk4_errors(ctx, dts=(2e-2, 1e-2, 5e-3)):
    s0 = sym.invariants_dirac(ctx.z0, ctx.params)
    A, B = dyn.analytic_constants(s0, ctx.params)
    errs = []
    for dt in dts:
        tr = ctx.run("reduced_lie_poisson", s0, dt=dt)
        exact = np.column_stack(dyn.analytic_reduced(tr.times, A, B, s0[3], ctx.params))
        errs.append(_max(tr.states[:, :3] - exact))
    return np.array(dts), np.array(errs)


@check("rk4_order", "dynamics", 0.2)
def _(ctx):
    dts, errs = _rk4_errors(ctx)
    slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
    return abs(slope - 4), 3, f"observed order {slope:.4f}"


@check("rk4_halving_ratio", "dynamics", 0.2)
def _(ctx):
    _, errs = _rk4_errors(ctx, (1e-2, 5e-3))
    ratio = errs[0] / errs[1]
    return abs(ratio / 16 - 1), 2, f"error ratio {ratio:.3f} (dt 1e-2 -> 5e-3)"


@check("analytic_reduced_satisfies_ode", "dynamics", 1e-8)
def _(ctx):
    res, h = 0.0, 1e-5
    for _ in range(20):
        t = ctx.rng.uniform(0, 10)
        A, B = ctx.rng.uniform(-2, 2, 2)
        lsq = ctx.rng.uniform(0.1, 4)
        s = np.array([*dyn.analytic_reduced(t, A, B, lsq, ctx.params), lsq])
        d = (np.array(dyn.analytic_reduced(t + h, A, B, lsq, ctx.params)) - np.array(dyn.analytic_reduced(t - h, A, B, lsq, ctx.params))) / (2 * h)
        res = max(res, _max(d - dyn.rhs("reduced_lie_poisson", s, ctx.params)[:3]))
    return res, 20, "central difference h=1e-5"


@check("analytic_paraboloid", "dynamics", 1e-12)
def _(ctx):
    res = 0.0
    for _ in range(100):
        t = ctx.rng.uniform(0, 10)
        A, B = ctx.rng.uniform(-2, 2, 2)
        lsq = ctx.rng.uniform(0.1, 4)
        s = np.array([*dyn.analytic_reduced(t, A, B, lsq, ctx.params), lsq])
        res = max(res, abs(float(ham.paraboloid_function(ctx.params)(s))))
    return res, 100, ""


@check("reduced_fixed_point", "dynamics", 1e-14)
def _(ctx):
    p = ctx.params
    lsq = 1.0
    s = np.array([-p.lam * lsq / (2 * p.mass**2), lsq / p.mass, 0.0, lsq])
    tr = ctx.run("reduced_lie_poisson", s, dt=1e-2, t_end=1.0)
    return max(_max(dyn.rhs("reduced_lie_poisson", s, p)), _max(tr.states - s)), len(tr), "J_Y=0, J_X=l^2/m"


@check("implicit_midpoint_energy", "dynamics", 1e-10)
def _(ctx):
    tr = ctx.run("dirac_bracket_canonical_h", method="implicit_midpoint", dt=1e-2)
    return dyn.conservation_summary(tr)["dH"], len(tr), "dt=1e-2, t in [0,10]"


@check("helix_circle", "dynamics", 1e-6)
def _(ctx):
    s = ctx.run("reduced_lie_poisson").states
    r = np.hypot(s[:, 1] - s[:, 3] / ctx.params.mass, s[:, 2])
    return float(np.std(r) / np.mean(r)), len(s), "(J_X, J_Y) circle about (l^2/m, 0)"


def _m2_run(ctx):
    p = Params(ctx.params.lam, 2.0)
    s0 = sym.invariants_dirac(on_surface(ctx.z0, p), p)
    period = 2 * np.pi * abs(p.lam / p.mass)
    return p, ctx.run("reduced_lie_poisson", s0, dt=1e-3, t_end=period, params=p)


@check("printed_C_m2_nonconserved", "dynamics", 1e-3, expected_fail=True)
def _(ctx):
    p, tr = _m2_run(ctx)
    c = ham.printed_casimir(p)(tr.states)
    return _max(c - c[0]), len(tr), "J_X^2 - 2 m l^2 J_X + J_Y^2 at m=2 over one period"


@check("cylinder_m2_conserved", "dynamics", 1e-8)
def _(ctx):
    p, tr = _m2_run(ctx)
    c = ham.cylinder_casimir(p)(tr.states)
    return _max(c - c[0]), len(tr), "(J_X - l^2/m)^2 + J_Y^2 at m=2 over one period"


# -- reduction -------------------------------------------------------------------


def _projection_check(which):
    @check(f"projection_commutes_with_flow_{which}", "reduction", 1e-6)
    def _(ctx):
        full = ctx.run("dirac_bracket_canonical_h")
        proj = dyn.project_full_to_reduced(full, which)
        red = ctx.run("reduced_lie_poisson", proj.states[0])
        return _max(proj.states - red.states), len(full), f"{which} triple"


for _which in ("dirac", "canonical"):
    _projection_check(_which)


@check("projection_lsq_constant", "reduction", 1e-12)
def _(ctx):
    proj = dyn.project_full_to_reduced(ctx.run("canonical_bracket_dirac_h"), "canonical")
    return _max(proj.states[:, 3] - proj.states[0, 3]), len(proj), ""


@check("dirac_vs_canonical_projection_on_surface", "reduction", 1e-10)
def _(ctx):
    full = ctx.run("canonical_bracket_dirac_h")
    a = dyn.project_full_to_reduced(full, "dirac").states
    b = dyn.project_full_to_reduced(full, "canonical").states
    return _max(a - b), len(full), ""


def _analytic_setup(ctx):
    s0 = sym.invariants_dirac(ctx.z0, ctx.params)
    A, B = dyn.analytic_constants(s0, ctx.params)
    p0 = ctx.z0[4:6]
    C0 = ctx.z0[:2] - dyn.analytic_configuration(0.0, A, B, p0, (0.0, 0.0), ctx.params)[0]
    return s0, A, B, p0, C0


@check("reconstruct_vs_analytic", "reduction", 1e-6)
def _(ctx):
    s0, A, B, p0, C0 = _analytic_setup(ctx)
    rec = dyn.reconstruct(ctx.run("reduced_lie_poisson", s0), p0, ctx.z0[:2])
    pos, _ = dyn.analytic_configuration(rec.times, A, B, p0, C0, ctx.params)
    return _max(rec.states[:, :2] - pos), len(rec), "Hermite quadrature, dt=1e-3"


@check("reconstruct_el_residual", "reduction", 1e-4)
def _(ctx):
    s0, *_ = _analytic_setup(ctx)
    rec = dyn.reconstruct(ctx.run("reduced_lie_poisson", s0), ctx.z0[4:6], ctx.z0[:2])
    return _max(ham.el_residual(dyn.finite_difference_jet(rec), ctx.params)), len(rec) - 2, "jets by central differences"


@check("analytic_configuration_invariants", "reduction", 1e-10)
def _(ctx):
    s0, A, B, p0, C0 = _analytic_setup(ctx)
    t = ctx.rng.uniform(0, 10, 100)
    z = dyn.analytic_full_state(t, A, B, p0, C0, ctx.params)
    want = np.column_stack([*dyn.analytic_reduced(t, A, B, s0[3], ctx.params), np.full(t.size, s0[3])])
    return _max(sym.invariants_dirac(z, ctx.params) - want), 100, ""


@check("darboux_roundtrip", "reduction", 1e-12)
def _(ctx):
    if not _needs_positive_lambda(ctx):
        return NA
    z = sample_full(ctx.rng, 100, ctx.params, surface=True)
    w = sym.darboux_forward(z, ctx.params)
    vel, _ = sym.inverse_legendre(w, ctx.params)
    return max(_max(sym.darboux_inverse(w, ctx.params) - z), _max(vel - z[:, 2:4])), 100, ""


@check("inverse_legendre_qdot", "reduction", 1e-6)
def _(ctx):
    if not _needs_positive_lambda(ctx):
        return NA
    tr = ctx.run("darboux_canonical_h")
    q = tr.column("q")
    dq = (q[:-4] - 8 * q[1:-3] + 8 * q[3:-1] - q[4:]) / (12 * tr.dt)
    _, qdot = sym.inverse_legendre(tr.states[2:-2], ctx.params)
    return _max(dq - qdot), len(tr) - 4, "five-point stencil"


# -- runner ----------------------------------------------------------------------


def run_check(name: str, seed: int = 42, params: Params | None = None, ctx: Context | None = None) -> CheckResult:
    c = REGISTRY[name]
    params = params or Params()
    if ctx is None:
        ctx = Context(params, seed, None)
    ctx.rng = ctx.rng_for(name)
    residual, n, notes = c.fn(ctx)
    residual = float(residual)
    passed = bool(residual <= c.tolerance) if math.isfinite(residual) else False
    return CheckResult(name, passed, residual, c.tolerance, int(n), notes, c.suite, c.expected_fail)


def check_names(suite: str = "all") -> list[str]:
    if suite != "all" and suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from all, {', '.join(SUITES)}")
    return sorted(n for n, c in REGISTRY.items() if suite == "all" or c.suite == suite)


def run_suite(suite: str = "all", seed: int = 42, params: Params | None = None) -> list[CheckResult]:
    """Run every check of ``suite``; deterministic in (suite, seed, params), sorted by name."""
    params = params or Params()
    ctx = Context(params, seed, None)
    return [run_check(n, seed, params, ctx) for n in check_names(suite)]


def all_ok(results) -> bool:
    return all(r.ok for r in results)


def format_table(results) -> str:
    w = max(len(r.name) for r in results)
    lines = [f"{'check':<{w}}  {'status':<13} {'residual':>10}  {'tolerance':>9}"]
    for r in results:
        status = ("PASS" if r.passed else "FAIL") + (" (control)" if r.expected_fail else "")
        lines.append(f"{r.name:<{w}}  {status:<13} {r.residual:10.3e}  {r.tolerance:9.1e}")
    bad = [r.name for r in results if not r.ok]
    lines.append(f"{len(results)} checks, {len(bad)} unexpected" + (": " + ", ".join(bad) if bad else ""))
    return "\n".join(lines)
