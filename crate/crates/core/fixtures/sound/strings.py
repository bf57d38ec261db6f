def greet(name):
    return 'hello ' + name

def shout(s):
    return s * 2

def main():
    g = greet('bob')
    s = shout(g)
    for ch in s:
        print(ch)
    print(len(s))
