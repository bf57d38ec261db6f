def fact(n):
    if n <= 1:
        return 1
    return n * fact(n - 1)

def even(n):
    if n == 0:
        return True
    return odd(n - 1)

def odd(n):
    if n == 0:
        return False
    return even(n - 1)

def main():
    x = fact(5)
    y = even(4)
    print(x, y)
