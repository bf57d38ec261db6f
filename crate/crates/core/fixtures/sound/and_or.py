class A:
    def m(self):
        return 1

class B:
    def m(self):
        return 2

def main():
    x = None or A()
    y = A() and B()
    x.m()
    y.m()
    z = 0 or 'text'
    print(z)
