class Shape:
    def area(self):
        return 0
    def describe(self):
        return self.area()

class Square(Shape):
    def __init__(self, side):
        self.side = side
    def area(self):
        return self.side * self.side

class Circle(Shape):
    def __init__(self, r):
        self.r = r
    def area(self):
        return 3 * self.r * self.r

def main():
    shapes = [Square(2), Circle(1), Shape()]
    total = 0
    for s in shapes:
        total = total + s.describe()
    print(total)
