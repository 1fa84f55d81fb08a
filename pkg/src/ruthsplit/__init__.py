"""Splitting of simplicial vector bundles over groupoid nerves into representations up to homotopy."""
