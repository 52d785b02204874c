import pytest

from apnlab.functions import FamilyParams, build_family_new, smallest_admissible
from apnlab.gf2m import get_field


@pytest.fixture(scope="session")
def family():
    """Cached family tables keyed by (m, k, alpha); alpha=None picks the smallest admissible."""
    cache = {}

    def get(m, k, alpha=None):
        K = get_field(m)
        a = smallest_admissible(K, k) if alpha is None else alpha
        key = (m, k, a)
        if key not in cache:
            cache[key] = build_family_new(FamilyParams(K, k, a))
        return cache[key]

    return get
