from pathlib import Path

import pytest

from schemahub.frontends.athena import parse_athena, parse_athena_file
from schemahub.frontends.orion import parse_orion_file

FIXTURES = Path(__file__).parent / "fixtures"

SHOP = """
Schema shop:1

Root entity Customer {
  Common {
    +id:    String,
    name:   String,
    points: Integer
  }
  Variation 1 {
    phone:  String
  }
  Variation 2 {
    email:  String,
    vip:    Boolean
  }
}

Root entity Order {
  +id:        String,
  customerId: String,
  total:      Integer
}
"""


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


@pytest.fixture
def sales():
    return parse_athena_file(FIXTURES / "sales.athena")


@pytest.fixture
def sales_ops():
    return parse_orion_file(FIXTURES / "sales_ops.orion")


@pytest.fixture
def stackoverflow():
    return parse_athena_file(FIXTURES / "stackoverflow.athena")


@pytest.fixture
def stackoverflow_ops():
    return parse_orion_file(FIXTURES / "stackoverflow_ops.orion")


@pytest.fixture
def reddit():
    return parse_athena_file(FIXTURES / "reddit.athena")


@pytest.fixture
def reddit_ops():
    return parse_orion_file(FIXTURES / "reddit_ops.orion")


@pytest.fixture
def shop():
    return parse_athena(SHOP, "shop.athena")
