class A:
    def __init__(self):
        self.tag = 'a'
    def who(self):
        return self.tag
    def hello(self):
        return self.who()

class B(A):
    def who(self):
        return 'b'

class C(B):
    def __init__(self):
        self.tag = 'c'

def main():
    for o in [A(), B(), C()]:
        o.hello()
