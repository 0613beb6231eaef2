# Copyright 2026 The OptiVote Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import pytest

import optivote


def test_error_bound_value():
    assert optivote.error_bound(10, 1.0, 0.2) == pytest.approx(0.25, abs=1e-15)


def test_lambda_matches_oracle():
    p = optivote.ChannelParams(c_fspl=500e3**2)
    assert optivote.lambda_oracle(p) == pytest.approx(optivote.lambda_eff(p), rel=1e-6)


def test_superpose_and_detect():
    e_plus, e_minus = optivote.superpose([1, 1, 1, -1], [1.0] * 4, [1.0] * 4)
    assert (e_plus, e_minus) == (3.0, 1.0)
    assert optivote.detect_mv([0.5, -0.2, 0.0]) == [1, -1, 1]
    assert optivote.ideal_majority([[1, -1], [-1, -1], [1, 1]]) == [1, -1]


def test_power_update():
    assert optivote.consistency_score([1, -1, 1, 1], [1, 1, 1, -1]) == 0.5
    p = optivote.update_powers([1.0, 1.0], [0.8, 0.2], rho=0.1)
    assert p == pytest.approx([1.03, 0.97], abs=1e-15)


def test_convergence_bound():
    b = optivote.convergence_bound(20, 1.0, 10.0, 5.0, [2.0], 4, 400)
    expect = (0.55 * math.sqrt(10) * 7 + (2 * math.sqrt(2) / 3) * 2 * 2) / 20
    assert b == pytest.approx(expect, abs=1e-12)


def test_run_is_deterministic():
    cfg = {"run": {"scheme": "optivote", "rounds": 5, "seed": 3}}
    a = optivote.run(cfg)
    b = optivote.run(cfg, threads=2)
    assert len(a["rounds"]) == 5
    assert a["rounds"] == b["rounds"]
    assert 0.0 <= a["final_accuracy"] <= 1.0


def test_bad_config_raises():
    with pytest.raises(ValueError, match="power.p_min"):
        optivote.run({"power": {"p_min": 3.0, "p_max": 2.0}})


def test_defaults_and_verify():
    d = optivote.config_defaults()
    assert d["run"]["M"] == 20
    reports = optivote.verify(samples=10000)
    assert all(r["pass"] for r in reports)
