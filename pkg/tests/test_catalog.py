from fractions import Fraction

import pytest
from gmpy2 import mpfr

from qbilat.catalog import (
    REGISTRY,
    ConstrainedParams,
    DougallParams,
    HornParams,
    IdentityId,
    LimitParams,
    PairParams,
    PhysicsParams,
    SamplerConfig,
    ThetaParams,
    check,
    domain_check,
    eval_side,
    p1_omitted_term,
    physics_as_constrained,
    sample_params,
    scan,
    statement,
)
from qbilat.errors import DomainError
from qbilat.qseries import QBase
from qbilat.values import RationalComplex

R = RationalComplex.parse
HALF = QBase.from_q("1/2")
FALSE_AS_STATED = {IdentityId.P1, IdentityId.CO4, IdentityId.CORL4, IdentityId.CORO2,
                   IdentityId.LIMIT_MAIN}
SMALL = SamplerConfig(samples=2, seed=7, q_grid=(Fraction(1, 2),))


def test_registry_complete():
    assert len(REGISTRY) == 26
    assert {t for t, info in REGISTRY.items() if not info.holds} == FALSE_AS_STATED
    for tag in REGISTRY:
        st = statement(tag)
        assert st["identity"] == tag.value and st["statement"]


@pytest.mark.parametrize("tag", [t for t in IdentityId if t not in FALSE_AS_STATED])
def test_true_identities_pass(tag, ctx):
    reports = scan(tag, SMALL, ctx)
    assert reports
    for rep in reports:
        assert rep.status == "pass", (rep.params, rep.abs_err, rep.tolerance)
        assert rep.abs_err <= rep.tolerance


@pytest.mark.parametrize("tag", sorted(FALSE_AS_STATED))
def test_false_statements_fail_with_notes(tag, ctx):
    reports = scan(tag, SMALL, ctx)
    assert reports and all(r.status == "fail" for r in reports)
    assert all(r.notes for r in reports)


def test_p1_omitted_term_closes_gap(ctx):
    params = PairParams(R("2/3"), R("1/5"), HALF)
    with ctx.local():
        lhs = eval_side("P1", "lhs", params, ctx).value
        rhs = eval_side("P1", "rhs", params, ctx).value
        gap = abs(lhs - rhs + p1_omitted_term(params, ctx).value)
        assert abs(lhs - rhs) > mpfr("1e-3")
        assert gap < mpfr("1e-60")


def test_coro2_repaired_note(ctx):
    params = sample_params("CORO2", SMALL)[0]
    rep = check("CORO2", params, ctx)
    note = [n for n in rep.notes if n.startswith("lhs minus the repaired right side")][0]
    assert float(note.rsplit(":", 1)[1]) < 1e-60


def test_limit_main_factor_two(ctx):
    rep = check("LIMIT_MAIN", LimitParams(R("1"), R("-1")), ctx)
    assert rep.status == "fail"
    assert any("lhs / rhs = 2.00000000000" in n for n in rep.notes)


def test_domain_check():
    ok, _ = domain_check("MAIN1", ConstrainedParams(R("1/2"), R("1/2"), HALF))
    assert ok
    ok, why = domain_check("MAIN1", ConstrainedParams(R("1/2"), R("10/3"), HALF))
    assert not ok and "|w|" in why
    assert not domain_check("HORN", HornParams(R("0.5"), R("1.2"), R("-1")))[0]
    assert not domain_check("HORN", HornParams(R("-0.3"), R("1.6"), R("1/2")))[0]
    assert not domain_check("DOUGALL", DougallParams(R("1"), R("1"), R("1"), R("1")))[0]
    assert not domain_check("LIMIT_MAIN", LimitParams(R("0"), R("-1")))[0]
    assert not domain_check("JTP", ThetaParams(R("0"), HALF))[0]
    # wrong record type is reported, not raised
    assert not domain_check("JTP", PairParams(R("1"), R("1"), HALF))[0]


def test_check_rejects_out_of_domain(ctx):
    with pytest.raises(DomainError):
        check("MAIN1", ConstrainedParams(R("1/2"), R("10/3"), HALF), ctx)
    with pytest.raises(DomainError):
        check("NOPE", ConstrainedParams(R("1/2"), R("1/2"), HALF), ctx)


def test_sampler_deterministic():
    cfg = SamplerConfig(samples=5, seed=42)
    a = [p.to_record() for p in sample_params("MAIN1", cfg)]
    b = [p.to_record() for p in sample_params("MAIN1", cfg)]
    c = [p.to_record() for p in sample_params("MAIN1", SamplerConfig(samples=5, seed=43))]
    assert a == b and a != c
    assert len(a) == 15
    assert len(sample_params("CO4", SamplerConfig(samples=2))) == 2 * 3 * 4


def test_sampled_points_in_domain():
    cfg = SamplerConfig(samples=10, seed=3)
    for tag in IdentityId:
        for p in sample_params(tag, cfg):
            assert domain_check(tag, p)[0], (tag, p)


def test_physics_substitution(ctx):
    p = PhysicsParams(R("0.8+0.3i"), R("0.9-0.2i"), HALF)
    c = physics_as_constrained(p, ctx)
    assert isinstance(c, ConstrainedParams)
    with ctx.local():
        for phys, main in (("PHYS1", "MAIN1"), ("PHYS2", "MAIN2")):
            a = eval_side(phys, "lhs", p, ctx)
            b = eval_side(main, "lhs", c, ctx)
            assert abs(a.value - b.value) <= 4 * (a.err + b.err) + mpfr("1e-70")


def test_report_record(ctx):
    rep = check("JTP", ThetaParams(R("0.7+0.1i"), HALF), ctx)
    rec = rep.to_record()
    assert rec["identity"] == "JTP" and rec["pass"] is True
    assert rec["params"]["z"] == "0.7+0.1i"
    assert rec["precision_bits"] == 256


def test_residual_shrinks_with_precision():
    from qbilat.numeric import PrecisionContext

    p = ConstrainedParams(R("0.6+0.4i"), R("0.5-0.5i"), QBase.from_q("0.7"))
    lo = check("MAIN1", p, PrecisionContext(256))
    hi = check("MAIN1", p, PrecisionContext(512))
    assert hi.status == "pass" and hi.abs_err < lo.abs_err * mpfr("1e-60")
