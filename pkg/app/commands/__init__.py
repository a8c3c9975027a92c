from app.commands import baseline, evaluate, selftest, train

COMMANDS = (train, evaluate, baseline, selftest)

__all__ = ["COMMANDS"]
