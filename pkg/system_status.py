#!/usr/bin/env python3
"""
System Status Checker - Reports the runtime environment of a pipeline run
Library versions and host facts end up in run_manifest.json
"""

import logging
import os
import platform
import sys
from importlib import metadata
from typing import Dict

import psutil

logger = logging.getLogger(__name__)


class SystemStatusChecker:
    """Collects interpreter, library and host information"""

    # (distribution name, role in the pipeline)
    REQUIRED_MODULES = [
        ('numpy', 'Profile arithmetic and PCA'),
        ('networkx', 'Comment networks and GraphML export'),
        ('matplotlib', 'Static SVG plots'),
        ('pydot', 'Graphviz DOT export'),
        ('psutil', 'Host facts')
    ]

    def __init__(self):
        self.platform = platform.system()
        self.results = {
            'python_modules': {},
            'host': {}
        }

    def display_banner(self):
        """Display status checker banner"""
        banner = """
╔══════════════════════════════════════════════════════════════╗
║               SPAM MOTIF TRACKER - SYSTEM STATUS              ║
╚══════════════════════════════════════════════════════════════╝
        """
        print(banner)

    def check_python_modules(self) -> Dict[str, str]:
        """Installed version of each pipeline dependency (None when missing)"""
        for module, description in self.REQUIRED_MODULES:
            try:
                self.results['python_modules'][module] = metadata.version(module)
            except metadata.PackageNotFoundError:
                logger.warning(f"{module} is not installed ({description})")
                self.results['python_modules'][module] = None
        return dict(self.results['python_modules'])

    def check_host(self) -> Dict:
        """CPU and memory facts of the machine"""
        memory = psutil.virtual_memory()
        self.results['host'] = {
            'platform': self.platform,
            'machine': platform.machine(),
            'cpu_count': psutil.cpu_count(logical=True),
            'physical_cores': psutil.cpu_count(logical=False),
            'memory_total_mb': memory.total // (1024 * 1024),
            'memory_available_mb': memory.available // (1024 * 1024)
        }
        return dict(self.results['host'])

    def versions(self) -> Dict[str, str]:
        """Versions recorded in the run manifest"""
        versions = {'python': platform.python_version()}
        versions.update(self.check_python_modules())
        return versions

    def run_full_check(self) -> Dict:
        """Print the full report and return it"""
        self.display_banner()

        print("\n📦 PYTHON MODULES")
        print("=" * 50)
        print(f"   python          - {platform.python_version()} ({sys.executable})")
        modules = self.check_python_modules()
        for module, description in self.REQUIRED_MODULES:
            version = modules[module]
            marker = "✅" if version else "❌"
            print(f"   {marker} {module:<12} - {version or 'MISSING'} ({description})")

        print("\n🖥️  HOST")
        print("=" * 50)
        for key, value in self.check_host().items():
            print(f"   {key:<20} {value}")

        recommended = max(1, (os.cpu_count() or 1) - 1)
        print(f"\n💡 Suggested --threads for this machine: {recommended}")

        missing = [m for m, v in modules.items() if not v]
        if missing:
            print(f"\n⚠️  Install missing modules: pip install {' '.join(missing)}")
        return self.results


def main():
    """Entry point"""
    checker = SystemStatusChecker()
    checker.run_full_check()
    return 0 if all(checker.results['python_modules'].values()) else 1


if __name__ == "__main__":
    sys.exit(main())
