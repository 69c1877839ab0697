from . import base, records, check
