class P:
    def f(self):
        return 1

class Q:
    def f(self):
        return 2

def choose(n):
    if n > 2:
        return P()
    elif n > 1:
        return Q()
    else:
        return None

def main():
    for k in range(4):
        x = choose(k)
        if x != None:
            x.f()
