from fractions import Fraction

import numpy as np
import pytest

from hgcolor import lemmas
from hgcolor.thresholds import UnivariateFns, lambda0


@pytest.fixture(scope="module")
def all_checks():
    return lemmas.run_all()


def test_every_registered_check_passes(all_checks):
    failed = [c for c in all_checks if not c.passed]
    assert not failed, lemmas.summary_text(failed)
    assert [c.lemma_id for c in all_checks] == sorted(lemmas.REGISTRY)


def test_registry_covers_the_stated_set():
    want = {f"app:lem{i:03d}" for i in (1, 2, 4, 5, 6, 7, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19)}
    assert want | {"app:feasible"} == set(lemmas.REGISTRY)


def test_run_all_is_deterministic(all_checks):
    again = lemmas.run_all()
    assert [(c.lemma_id, c.worst_margin) for c in again] == [(c.lemma_id, c.worst_margin) for c in all_checks]


def test_unknown_id():
    with pytest.raises(KeyError):
        lemmas.run_check("app:lem999")


def test_mutated_formula_is_caught(monkeypatch):
    monkeypatch.setattr(lemmas, "lem017_margin", lambda k: 0.5 * (k - 1) - np.sqrt(k) * np.log(k))
    assert not lemmas.run_check("app:lem017").passed


def test_lem001_equality_only_at_zero():
    z = np.linspace(-1 + 1e-6, 10, 10_001)
    m = lemmas.lem001_margin(z)
    assert np.all(m >= 0)
    assert np.argmin(m) == np.argmin(np.abs(z))


def test_lem010_example():
    assert lemmas.check_lem010().passed


def test_lem012_taylor_coefficients():
    for r in (2, 3):
        assert lemmas.lem012_series(r)[1] > 0
    assert lemmas.lem012_series(4)[1] == 0
    assert lemmas.lem012_series(4)[2] == Fraction(1, 15)
    for r in range(5, 12):
        assert lemmas.lem012_series(r)[1] == Fraction(2 - (r - 2) * (r - 3), 12) < 0


def test_lem019_excludes_the_counterexample():
    assert lemmas.lem019_margin(2, 3) < 0
    assert (2, 3) not in lemmas.lem019_domain()


def test_lem009_root_counts_at_most_two():
    for r, k in [(3, 2), (5, 2), (9, 3)]:
        counts = lemmas.lem009_root_counts(r, k)
        assert counts and max(counts) <= 2


def test_lem011_chain():
    for k in range(2, 6):
        for r in range(2 * k + 1, 21):
            F = UnivariateFns(r, k)
            assert F.eta(1e-300) < F.eta(1 - 1 / k) < lambda0(r, k)


def test_lem014_closure():
    from hgcolor.thresholds import regularity_margin

    for r in range(3, 29):
        for k in range(2, 29):
            if regularity_margin(r, k) >= 0:
                assert regularity_margin(r + 1, k) >= 0
                assert regularity_margin(r, k + 1) >= 0


def test_summaries():
    checks = [lemmas.run_check("app:lem017"), lemmas.run_check("app:lem019")]
    text = lemmas.summary_text(checks)
    assert "2/2 checks passed" in text
    csv_text = lemmas.summary_csv(checks)
    assert csv_text.splitlines()[0] == "lemma_id,domain,worst_margin,passed"
    assert len(csv_text.splitlines()) == 3
