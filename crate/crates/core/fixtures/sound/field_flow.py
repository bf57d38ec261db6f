class Box:
    def __init__(self):
        self.item = None
    def put(self, v):
        self.item = v
    def take(self):
        return self.item

class Apple:
    def eat(self):
        return 'crunch'

class Stone:
    def eat(self):
        return 'ouch'

def main():
    b = Box()
    b.put(Apple())
    fruit = b.take()
    fruit.eat()
    c = Box()
    c.put(Stone())
    c.take().eat()
