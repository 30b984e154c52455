"""Cornering controller that regulates the front/rear wheel sideslip difference."""

from .params import MotorTorqueCurve, VehicleParams, max_motor_torque, understeer_gain

__all__ = ["MotorTorqueCurve", "VehicleParams", "max_motor_torque", "understeer_gain"]
__version__ = "0.1.0"
