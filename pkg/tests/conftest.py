import pytest

from fibtotient.cli import bundled_table_path
from fibtotient.factoring import load_factor_table_path


@pytest.fixture(scope="session")
def table():
    return load_factor_table_path(bundled_table_path())
