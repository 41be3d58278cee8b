"""Shared record of acceptance outcomes, printed in the terminal summary."""
RESULTS: list[str] = []
