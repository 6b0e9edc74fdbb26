"""
测试公共夹具
"""

import sys
from pathlib import Path

import numpy as np
import pytest

project_root = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root))
sys.path.insert(0, str(project_root / 'src'))

from config import CONFIG_DIR, load_config, load_scenario
from core.rb_grid import build_rb_grid
from simulation.frame_loop import FrameContext


@pytest.fixture(scope='session')
def desk_config():
    """桌面规模：M=2，3个eMBB + 1个uRLLC，F=(8,2)，T=(1,4)"""
    return load_config()


@pytest.fixture(scope='session')
def tiny_config():
    """极小实例：M=2，U=2，每个切片 F=1、T=2"""
    return load_scenario('tiny')


@pytest.fixture(scope='session')
def full_config():
    return load_config(CONFIG_DIR / 'full_scale.yaml')


@pytest.fixture(scope='session')
def full_grid(full_config):
    return build_rb_grid(full_config)


@pytest.fixture(scope='session')
def tiny_ctx(tiny_config):
    return FrameContext.build(tiny_config)


@pytest.fixture(scope='session')
def desk_ctx(desk_config):
    return FrameContext.build(desk_config)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
