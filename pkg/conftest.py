"""共享的测试夹具：构造较慢的实例只做一次。标记为 slow 的测试要加 --runslow 才跑。"""
import pytest

from mrc.construct import build_instance, zero_global_strip
from mrc.models import Construction, hdl_params, hl_params
from mrc.verify import is_mr


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="运行标记为 slow 的测试")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: 大范围扫描，默认跳过")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="需要 --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def hl16():
    """HL(5, 3, 2, 1, 1, 2)，h1 = 1 构造，n = 16，q = 5。"""
    return build_instance(hl_params(5, 3, 2, 1, 1, 2), Construction.H1_ONE)


@pytest.fixture(scope="session")
def hl16_certificate(hl16):
    return is_mr(hl16, workers=1, timing=False)


@pytest.fixture(scope="session")
def hl16_stripped(hl16):
    return zero_global_strip(hl16, 1)


@pytest.fixture(scope="session")
def h1_two():
    """HL(2, 2, 2, 2, 2, 1)，一般构造，q = 4。"""
    return build_instance(hl_params(2, 2, 2, 2, 2, 1))


@pytest.fixture(scope="session")
def h1_two_certificate(h1_two):
    return is_mr(h1_two, timing=False)


@pytest.fixture(scope="session")
def hdl_source():
    """HL(3, 2, 1, 1, 1, 2)，h1 = 1 构造，可删成 HDL(2, 2, 1, 1, 1, 2)。"""
    return build_instance(hl_params(3, 2, 1, 1, 1, 2), Construction.H1_ONE)


@pytest.fixture(scope="session")
def hdl_derived():
    """HDL(2, 2, 1, 1, 1, 2)，由 hdl_source 的参数构造后删符号得到。"""
    return build_instance(hdl_params(2, 2, 1, 1, 1, 2), Construction.H1_ONE)
