"""Two-player network design games: enforceability, bad configurations and price of stability."""
