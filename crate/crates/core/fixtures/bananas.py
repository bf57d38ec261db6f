class Banana:
    def eat(self):
        pass
class Carrot:
    def eat(self):
        pass
class Person:
    def __init__(self):
        self.no_bananas()
    def no_bananas(self):
        self.bananas = []
    def add_banana(self, banana):
        self.bananas.append(banana)
    def eat_bananas(self):
        for banana in self.bananas:
            banana.eat()
        self.no_bananas()
def main():
    person = Person()
    for a in range(1, 10):
        person.add_banana(Banana())
        person.eat_bananas()
