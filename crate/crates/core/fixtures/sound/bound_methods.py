class Counter:
    def __init__(self):
        self.n = 0
    def bump(self):
        self.n = self.n + 1
        return self.n

def call_twice(f):
    f()
    return f()

def main():
    c = Counter()
    b = c.bump
    call_twice(b)
    print(c.n)
