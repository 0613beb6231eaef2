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

"""Python bindings for the optivote simulator."""

from ._core import (
    ChannelParams,
    __version__,
    config_defaults,
    consistency_score,
    convergence_bound,
    detect_mv,
    energy_means,
    error_bound,
    error_bound_full,
    ideal_majority,
    lambda_eff,
    lambda_oracle,
    q_bound,
    run,
    superpose,
    theta,
    update_powers,
    verify,
    xi_snr,
)

__all__ = [
    "ChannelParams",
    "__version__",
    "config_defaults",
    "consistency_score",
    "convergence_bound",
    "detect_mv",
    "energy_means",
    "error_bound",
    "error_bound_full",
    "ideal_majority",
    "lambda_eff",
    "lambda_oracle",
    "q_bound",
    "run",
    "superpose",
    "theta",
    "update_powers",
    "verify",
    "xi_snr",
]
