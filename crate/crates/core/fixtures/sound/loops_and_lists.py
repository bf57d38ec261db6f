class Item:
    def price(self):
        return 3

def main():
    items = []
    for i in range(3):
        items.append(Item())
    total = 0
    for it in items:
        total = total + it.price()
    n = len(items)
    while n > 0:
        n -= 1
        print(n)
