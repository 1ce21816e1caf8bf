import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pkaroubi import fchain, idem  # noqa: E402
from pkaroubi.field import Field  # noqa: E402
from pkaroubi.pcat import ShiftedObject, WMorphism  # noqa: E402

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

F2 = Field.prime(2)
F3 = Field.prime(3)
QQ = Field.rational()
ALL_FIELDS = [F2, F3, QQ]


@pytest.fixture(params=ALL_FIELDS, ids=lambda f: f.name)
def field(request):
    return request.param


def random_hfch(field, seed):
    """Homology category of a split complex A (with a filtered idempotent) and a random B."""
    rng = random.Random(seed)
    r = rng.choice([Fraction(0), Fraction(1, 2), Fraction(1)])
    S, e = fchain.random_split_idempotent(field, rng, r, name="A", pieces=(rng.choice([1, 2]), 1))
    B = fchain.random_complex(field, rng, pieces=2, name="B")
    return fchain.HFCh({"A": S, "B": B}, name="rand%d" % seed), e


def sample_idempotents(P, a, rng, tries=40, top=Fraction(2)):
    """Weighted idempotents on ``a`` found by sampling Hom(a, a) at grid weights up to ``top``."""
    m = P.hom(a, a)
    F = P.field
    coeffs = list(F.elements()) if F.p else [0, 0, 1, -1, 2, Fraction(1, 2)]
    out, seen = [], set()
    for r in sorted(c for c in P.grid() if 0 <= c <= top):
        alive = [i for i, b in enumerate(m.births) if b <= r]
        for _ in range(tries):
            v = [F.zero] * len(m.gens)
            for i in alive:
                v[i] = F(rng.choice(coeffs))
            f = WMorphism(ShiftedObject(a), ShiftedObject(a), r, tuple(v))
            key = (r, m.normal_form(f.vec, r))
            if key in seen:
                continue
            seen.add(key)
            if idem.is_weighted_idempotent(P, f):
                out.append(f)
    return out


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
