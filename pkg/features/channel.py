#! /usr/bin/env python
"""Air-to-ground and terrestrial link budget, vectorised over user positions.

Received power per user is P / (N_k * L) and noise per user is N0 * W_k / N_k,
so the per-user SNR P / (L * N0 * W_k) does not depend on the cell load N_k.
"""

from typing import Sequence, Union

import numpy as np
import numpy.typing as npt

from features.scenario import ChannelParams, NodeSpec, Scenario

FloatArray = npt.NDArray[np.float64]
Coordinate = Union[float, Sequence[float], FloatArray]

LOS_MIN_ELEVATION = np.pi / 12


def distance3d(node: NodeSpec, x: Coordinate, y: Coordinate) -> FloatArray:
    """Euclidean distance from the node antenna to ground points (x, y)."""

    dx = np.asarray(x, dtype=np.float64) - node.x
    dy = np.asarray(y, dtype=np.float64) - node.y
    return np.sqrt(dx**2 + dy**2 + node.height**2)


def elevation_angle(node: NodeSpec, x: Coordinate, y: Coordinate) -> FloatArray:
    if not node.is_aerial:
        raise ValueError(f"elevation angle is defined for aerial nodes only, node {node.id} is {node.kind.value}")

    # arcsin(h/d) loses precision near pi/2, arctan2 of the horizontal offset does not
    horizontal = np.hypot(np.asarray(x, dtype=np.float64) - node.x, np.asarray(y, dtype=np.float64) - node.y)
    return np.arctan2(node.height, horizontal)


def los_probability(params: ChannelParams, theta: Coordinate) -> FloatArray:
    theta = np.asarray(theta, dtype=np.float64)
    base = np.clip(np.degrees(theta) - 15.0, 0.0, None)
    probability = params.alpha * np.power(base, params.gamma)
    # below 15 degrees the link is treated as NLoS
    probability = np.where(theta > LOS_MIN_ELEVATION, probability, 0.0)
    return np.clip(probability, 0.0, 1.0)


def mean_path_loss_uav(params: ChannelParams, node: NodeSpec, x: Coordinate, y: Coordinate) -> FloatArray:
    distance = distance3d(node, x, y)
    p_los = los_probability(params, elevation_angle(node, x, y))
    attenuation = p_los * params.mu_los + (1.0 - p_los) * params.mu_nlos
    return params.k_o * (distance / params.ref_distance) ** 2 * attenuation


def path_loss_bs(params: ChannelParams, node: NodeSpec, x: Coordinate, y: Coordinate) -> FloatArray:
    if node.is_aerial:
        raise ValueError(f"terrestrial path loss requested for aerial node {node.id}")

    return params.k_o * (distance3d(node, x, y) / params.ref_distance) ** params.pathloss_exp


def path_loss(params: ChannelParams, node: NodeSpec, x: Coordinate, y: Coordinate) -> FloatArray:
    if node.is_aerial:
        return mean_path_loss_uav(params, node, x, y)
    return path_loss_bs(params, node, x, y)


def snr(scenario: Scenario, node: NodeSpec, x: Coordinate, y: Coordinate) -> FloatArray:
    params = scenario.channel
    return node.tx_power / (path_loss(params, node, x, y) * params.noise_psd * node.bandwidth)


def spectral_efficiency(snr_values: Coordinate) -> FloatArray:
    return np.log2(1.0 + np.asarray(snr_values, dtype=np.float64))


def delay_from_snr(payload_bits: float, snr_values: Coordinate) -> FloatArray:
    snr_values = np.asarray(snr_values, dtype=np.float64)
    if np.any(~(snr_values > 0)):
        raise ValueError("unreachable point: SNR is zero")

    return payload_bits / spectral_efficiency(snr_values)


def delay_kernel(scenario: Scenario, node: NodeSpec, x: Coordinate, y: Coordinate) -> FloatArray:
    """Per-location delay factor F = b / log2(1 + SNR)."""

    return delay_from_snr(scenario.payload_bits, snr(scenario, node, x, y))


def snr_matrix(scenario: Scenario, x: Coordinate, y: Coordinate) -> FloatArray:
    """SNR of every node (rows, ascending id) at every point (columns)."""

    return np.stack([np.atleast_1d(snr(scenario, node, x, y)) for node in scenario.nodes])


def kernel_matrix(scenario: Scenario, x: Coordinate, y: Coordinate) -> FloatArray:
    return delay_from_snr(scenario.payload_bits, snr_matrix(scenario, x, y))
