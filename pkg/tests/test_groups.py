import numpy as np
import pytest

from sincov import algebra as alg
from sincov import groups as gr
from sincov.exceptions import DomainError, GroupAxiomError


def test_cyclic_exponential():
    G = gr.bundled_group("Z6")
    w = np.exp(2j * np.pi / 6)
    S, rep = gr.from_group(G, w ** np.arange(6))
    assert rep.exponential and rep.sincov and rep.biconditional_holds
    assert rep.max_sincov_defect < 1e-12
    # S(f, g) = w^(f - g)
    for f in range(6):
        for g in range(6):
            assert abs(S(str(f), str(g)) - w ** (f - g)) < 1e-12


def test_cyclic_non_exponential():
    S, rep = gr.from_group(gr.bundled_group("Z6"), np.arange(6) + 1.0)
    assert not rep.exponential and not rep.sincov
    assert rep.max_sincov_defect > 0.1
    # brute-force exponential defect
    t = gr.cyclic_table(6)
    F = np.arange(6) + 1.0
    worst = max(abs(F[t[a, b]] - F[a] * F[b]) for a in range(6) for b in range(6))
    assert rep.max_exponential_defect == worst


def test_trivial_group():
    S, rep = gr.from_group([[0]], [1.0])
    assert rep.exponential and rep.sincov
    S, rep = gr.from_group([[0]], [2.0])
    assert not rep.exponential and not rep.sincov


def test_symmetric_group():
    G = gr.bundled_group("S3")
    assert G.order == 6 and G.labels[G.identity] == "012"
    # sign character is exponential
    sign = []
    for lab in G.labels:
        p = [int(c) for c in lab]
        inv = sum(1 for i in range(3) for j in range(i + 1, 3) if p[i] > p[j])
        sign.append((-1) ** inv)
    _, rep = gr.from_group(G, sign)
    assert rep.exponential and rep.sincov
    # S3 is non-abelian
    assert not np.array_equal(G.table, G.table.T)


def test_zn_names():
    assert gr.bundled_group("Z5").order == 5
    with pytest.raises(KeyError):
        gr.bundled_group("Q8")


@pytest.mark.parametrize(
    "table,axiom",
    [
        ([[0, 1], [1, 2]], "closure"),
        ([[0, 1], [0, 1]], "identity"),
        ([[0, 1, 2], [1, 0, 0], [2, 0, 0]], "associativity"),
        ([[0, 1, 2], [1, 1, 1], [2, 1, 2]], "inverses"),
        ([[0, 1, 2]], "closure"),
    ],
)
def test_axiom_errors(table, axiom):
    with pytest.raises(GroupAxiomError) as info:
        gr.validate_group(table)
    assert info.value.axiom == axiom


def test_fmap_length():
    with pytest.raises(DomainError):
        gr.from_group(gr.bundled_group("Z6"), [1, 1, 1])


def test_algebra_valued_fmap():
    spec = alg.function_algebra(["a", "b"])
    w = np.exp(2j * np.pi / 6) ** np.arange(6)
    vals = np.stack([w, w**2], axis=1)
    S, rep = gr.from_group(gr.bundled_group("Z6"), [spec.element(v) for v in vals])
    assert rep.exponential and rep.sincov
    vals[3, 1] = 5.0
    _, rep = gr.from_group(gr.bundled_group("Z6"), vals, algebra=spec)
    assert not rep.exponential and not rep.sincov


@pytest.mark.parametrize("name", ["Z6", "S3"])
def test_biconditional_random(name):
    G = gr.bundled_group(name)
    rng = np.random.default_rng(3)
    for _ in range(20):
        _, rep = gr.from_group(G, rng.normal(size=6) + 1j * rng.normal(size=6))
        assert rep.biconditional_holds
