class Add:
    def apply(self, a, b):
        return a + b

class Mul:
    def apply(self, a, b):
        return a * b

class Calculator:
    def __init__(self, op):
        self.op = op
    def run(self, a, b):
        return self.op.apply(a, b)

def main():
    ops = [Add(), Mul()]
    for op in ops:
        c = Calculator(op)
        c.run(2, 3)
