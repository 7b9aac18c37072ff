"""App factory for manual smoke runs against a real server process.

    FORGE_WORKSPACE=/tmp/ws python -m uvicorn --factory tests.smoke_app:build
"""

import os

from assumption_forge.service import create_app
from assumption_forge.workspace import Workspace


def build():
    return create_app(
        Workspace(os.environ.get("FORGE_WORKSPACE", "/tmp/forge-smoke-workspace")),
        ui_dist=os.environ.get("FORGE_UI_DIST", "frontend/dist"),
    )
