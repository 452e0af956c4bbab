"""
Pytest configuration and shared fixtures
"""

import json
import os
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path
from typing import Any, Callable, Dict, List

import numpy as np
import pytest
import yaml

from topos_measure.groupoid import FiniteAction, FiniteGroupoid, make_action, validate_groupoid

ROOT = Path(__file__).parent.parent
FIXTURES = Path(__file__).parent / "fixtures"

Z2_SPEC = {
    'objects': ['s'],
    'morphisms': [
        {'name': 'e', 'src': 's', 'dst': 's'},
        {'name': 'g', 'src': 's', 'dst': 's'},
    ],
    'compose': [['e', 'e', 'e'], ['e', 'g', 'g'], ['g', 'e', 'g'], ['g', 'g', 'e']],
}

TRIVIAL_SPEC = {
    'objects': ['s'],
    'morphisms': [{'name': 'e', 'src': 's', 'dst': 's'}],
    'compose': [['e', 'e', 'e']],
}


@pytest.fixture
def temp_dir():
    """Create a temporary directory for test files"""
    temp_path = Path(tempfile.mkdtemp())
    yield temp_path
    shutil.rmtree(temp_path)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def z2() -> FiniteGroupoid:
    """ℤ/2 as a one-object groupoid"""
    return validate_groupoid(Z2_SPEC)


@pytest.fixture
def trivial() -> FiniteGroupoid:
    """The trivial group as a one-object groupoid"""
    return validate_groupoid(TRIVIAL_SPEC)


@pytest.fixture
def z2_abc(z2) -> FiniteAction:
    """ℤ/2 swapping a and b, fixing c"""
    return make_action(z2, {'s': ['a', 'b', 'c']}, {'g': {'a': 'b', 'b': 'a', 'c': 'c'}}, "X")


@pytest.fixture
def z2_regular(z2) -> FiniteAction:
    return make_action(z2, {'s': ['g0', 'g1']}, {'g': {'g0': 'g1', 'g1': 'g0'}}, "G")


@pytest.fixture
def points(trivial) -> Callable[..., FiniteAction]:
    """Factory for trivial actions on named points"""
    def build(*names: str, name: str = "P") -> FiniteAction:
        return make_action(trivial, {'s': list(names)}, {}, name)
    return build


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def write_config(temp_dir) -> Callable[[Dict[str, Any], str], Path]:
    """Write a model dict to a file in the temp directory"""
    def write(data: Dict[str, Any], filename: str = "model.json") -> Path:
        path = temp_dir / filename
        if filename.endswith(('.yaml', '.yml')):
            path.write_text(yaml.safe_dump(data))
        else:
            path.write_text(json.dumps(data))
        return path
    return write


@pytest.fixture
def z2_model() -> Dict[str, Any]:
    """The shipped ℤ/2 model as a dict, for editing in tests"""
    return json.loads((FIXTURES / "z2_abc.json").read_text())


def run_cli(*args: str) -> subprocess.CompletedProcess:
    """Run the command line in a subprocess"""
    return subprocess.run(
        [sys.executable, '-m', 'topos_measure.main', *args],
        capture_output=True,
        text=True,
        cwd=ROOT,
        env={**os.environ, 'COLUMNS': '200'},
    )


def report_of(result: subprocess.CompletedProcess) -> Dict[str, Any]:
    return json.loads(result.stdout)


def statuses(checks: List[Dict[str, Any]]) -> Dict[str, str]:
    return {c['name']: c['status'] for c in checks}
