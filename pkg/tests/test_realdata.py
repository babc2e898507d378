import math
import re
from decimal import Decimal

import numpy as np
import pytest

from varextropy.empirical import SampleData
from varextropy.exceptions import DegenerateWindowError, ParseError
from varextropy.realdata import (
    CANCER_LISTING,
    CANCER_RATE,
    CANCER_WINDOWS,
    PUBLISHED_TABLE,
    analyze,
    load_embedded_dataset,
    parse_listing,
)

# own-convention values (m = 11, support-scale kernel, Silverman bandwidth)
FROZEN = {
    (1.0, 7.0): (-0.00012224651452748606, 0.0005637511613286383, 5.830459846654316e-05),
    (1.0, 13.0): (0.00017348785186032528, 0.00023441316784826843, 0.00012231775436142536),
    (2.0, 10.0): (-4.2174025998700446e-05, 0.0003943118029148193, 8.768729219998028e-05),
}


def _decimal_tokens():
    return [Decimal(t) for t in re.findall(r"\d+\.\d+", CANCER_LISTING)]


def test_dataset_integrity():
    s = load_embedded_dataset()
    assert s.n == 128
    assert np.all(np.diff(s.values) >= 0) and np.all(s.values > 0)
    assert s.values[0] == 0.08 and s.values[-1] == 79.05
    assert sum(_decimal_tokens()) == Decimal("1178.80")
    assert math.fsum(s.values) == pytest.approx(1178.8, abs=1e-10)
    assert np.array_equal(SampleData(parse_listing(CANCER_LISTING)).values, s.values)
    assert sorted(float(d) for d in _decimal_tokens()) == s.values.tolist()


def test_parse_listing():
    assert parse_listing("1.5, 2.25,\n3.0.") == [1.5, 2.25, 3.0]
    with pytest.raises(ParseError):
        parse_listing("1.5, abc")


def test_analyze_embedded_windows():
    rows = analyze(load_embedded_dataset())
    assert [(r.t1, r.t2) for r in rows] == list(CANCER_WINDOWS)
    derived = CANCER_RATE**2 / 48
    for r in rows:
        assert not r.errors
        assert r.model_closed == pytest.approx(derived, abs=1e-15)
        assert r.model_numeric == pytest.approx(derived, abs=1e-12)
        assert r.model_closed == pytest.approx(0.0002375, abs=1e-7)
        for kind, frozen in zip(("spacing", "kde-integral", "kde-plugin"), FROZEN[(r.t1, r.t2)]):
            value = r.estimates[kind]
            assert math.isfinite(value)
            assert 1e-5 <= abs(value) <= 1e-1
            assert value == pytest.approx(frozen, rel=1e-9)
        assert r.published == PUBLISHED_TABLE[(r.t1, r.t2)]


def test_window_masses():
    masses = [r.mass for r in analyze(load_embedded_dataset())]
    assert masses == [63 / 128, 95 / 128, 76 / 128]


def test_analyze_serialisation_and_errors():
    d = analyze(load_embedded_dataset(), [(1, 7)])[0].to_dict()
    assert set(d) == {"t1", "t2", "mass", "estimates", "model_iv_closed", "model_iv_numeric", "published"}
    with pytest.raises(DegenerateWindowError):
        analyze(load_embedded_dataset(), [(100, 200)])
