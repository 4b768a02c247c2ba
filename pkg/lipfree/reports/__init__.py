from .manifest import RunManifest
from .example32 import ZWitness, example32_report, predicted_denting_set, z_witnesses
from .profile import ProfileRow, delta_profile, parse_terms, profile_csv
