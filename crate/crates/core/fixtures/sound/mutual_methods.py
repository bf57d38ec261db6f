class Ping:
    def __init__(self):
        self.other = None
    def hit(self, n):
        if n > 0:
            self.other.hit(n - 1)

class Pong:
    def __init__(self):
        self.other = None
    def hit(self, n):
        if n > 0:
            self.other.hit(n - 1)

def main():
    a = Ping()
    b = Pong()
    a.other = b
    b.other = a
    a.hit(5)
