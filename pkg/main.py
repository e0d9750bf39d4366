#!/usr/bin/env python3
"""
GeoForge - launch the interactive workbench
"""

import os
import sys

# Add current directory to Python path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from geoforge.log import debug_log
from geoforge.workbench.app import run_workbench

if __name__ == "__main__":
    try:
        debug_log("Starting GeoForge workbench...")
        run_workbench()
    except Exception as e:
        debug_log(f"Fatal error: {e}", "ERROR")
        import traceback
        traceback.print_exc()
