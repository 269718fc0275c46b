"""Latin boards: constraint solving, puzzle generation, fairness and rating."""
