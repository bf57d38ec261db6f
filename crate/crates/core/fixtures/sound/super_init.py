class Base:
    def __init__(self):
        self.parts = []
        self.setup()
    def setup(self):
        self.parts.append('base')

class Derived(Base):
    def setup(self):
        self.parts.append(Extra())

class Extra:
    def use(self):
        return 1

def main():
    d = Derived()
    for p in d.parts:
        print(p)
    b = Base()
