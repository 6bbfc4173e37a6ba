"""Quasigroups, identities, the model finder and the classification report."""
