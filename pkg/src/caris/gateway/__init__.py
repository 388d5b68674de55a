from caris.gateway.app import create_app
from caris.gateway.state import GatewaySettings, Runtime

__all__ = ["create_app", "GatewaySettings", "Runtime"]
