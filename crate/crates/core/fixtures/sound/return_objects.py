class Token:
    def __init__(self, kind):
        self.kind = kind
    def text(self):
        return self.kind

class Lexer:
    def __init__(self):
        self.tokens = []
    def add(self, k):
        t = Token(k)
        self.tokens.append(t)
        return t
    def first(self):
        for t in self.tokens:
            return t
        return None

def main():
    lx = Lexer()
    lx.add('name')
    lx.add('int')
    f = lx.first()
    f.text()
