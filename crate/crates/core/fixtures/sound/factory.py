class Dog:
    def speak(self):
        return 'woof'

class Cat:
    def speak(self):
        return 'meow'

def make(kind):
    if kind == 'dog':
        return Dog
    return Cat

def main():
    cls = make('cat')
    pet = cls()
    pet.speak()
    other = make('dog')()
    other.speak()
