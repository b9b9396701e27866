"""Schema evolution toolchain for schemaless and NoSQL stores."""
__version__ = "0.1.0"
