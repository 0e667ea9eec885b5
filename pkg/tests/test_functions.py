import math

import numpy as np
import pytest

from hyperlasso.errors import ConfigError, InvalidArgument
from hyperlasso.functions import BUILTINS, WENDLAND_DELTA, built_in_function, load_user_function, wendland
from hyperlasso.quadrature import cube_rule, disc_rule, gauss_legendre_rule, sphere_product_rule


def test_point_values():
    assert built_in_function("exp_sq", 0.0) == 1.0
    assert built_in_function("cube_exp", [1.0, 1.0, 1.0]) == pytest.approx(math.exp(-1 / 3))
    assert built_in_function("cube_exp", [0.0, 0.0, 0.0]) == 0.0
    assert built_in_function("disc_poisson", [0.0, 0.0]) == 1.0


def test_wendland_delta():
    assert WENDLAND_DELTA == pytest.approx(9 * math.gamma(2.5) / (2 * math.gamma(3)))
    assert WENDLAND_DELTA == pytest.approx(2.99101, abs=1e-5)


def test_wendland_caps_at_pole():
    expect = 1 + 4 * wendland(math.sqrt(2) / WENDLAND_DELTA) + wendland(2 / WENDLAND_DELTA)
    assert built_in_function("wendland_caps", [0.0, 0.0, 1.0]) == pytest.approx(expect)
    assert wendland(0.0) == 1.0
    assert wendland(1.0) == 0.0 and wendland(3.0) == 0.0


def test_out_of_domain_and_unknown():
    with pytest.raises(InvalidArgument):
        built_in_function("wendland_caps", [0.0, 0.0, 0.5])
    with pytest.raises(ConfigError):
        built_in_function("runge")


@pytest.mark.parametrize("name,rule", [
    ("exp_sq", gauss_legendre_rule(400)),
    ("disc_poisson", disc_rule(60)),
    ("wendland_caps", sphere_product_rule(60)),
    ("cube_exp", cube_rule(40)),
])
def test_sup_norm_bounds_hold(name, rule):
    fn = BUILTINS[name]
    arg = rule.nodes[:, 0] if name == "exp_sq" else rule.nodes
    assert np.abs(fn(arg)).max() <= fn.sup_norm


def test_user_function(tmp_path):
    p = tmp_path / "f.py"
    p.write_text("import numpy as np\nSUP_NORM = 1.0\ndef f(x):\n    return np.cos(x)\n")
    fn = load_user_function(p, "interval")
    assert fn(np.array([0.0]))[0] == 1.0 and fn.sup_norm == 1.0
    (tmp_path / "g.py").write_text("x = 1\n")
    with pytest.raises(ConfigError):
        load_user_function(tmp_path / "g.py", "interval")
    with pytest.raises(ConfigError):
        load_user_function(tmp_path / "missing.py", "interval")
