def double(x):
    return x * 2

def inc(x):
    return x + 1

def apply(f, v):
    return f(v)

def pick(n):
    if n > 0:
        return double
    return inc

def main():
    a = apply(double, 3)
    b = apply(pick(0), a)
    g = pick(1)
    print(g(b))
