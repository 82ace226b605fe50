"""Age-of-information scheduling: drift-plus-penalty simulator and constrained-MDP oracle."""
