class Account:
    def __init__(self):
        self.balance = 0
    def deposit(self, n):
        self.balance = self.balance + n
    def report(self):
        return self.balance

def test_deposit():
    a = Account()
    a.deposit(5)
    a.report()

def main():
    a = Account()
    a.report()
