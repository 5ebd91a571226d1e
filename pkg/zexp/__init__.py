"""zexp: explicit Zassenhaus and BCH product expansions in a free algebra."""
