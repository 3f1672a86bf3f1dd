from cfsm_verify.src.api_export import cfsm_verify_export

# Unique source of truth for the version number.
__version__ = "0.0.1"


@cfsm_verify_export("cfsm_verify.version")
def version() -> str:
    return __version__
